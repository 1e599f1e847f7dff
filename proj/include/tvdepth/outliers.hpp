/*
 * Copyright 2026 The tvdepth authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef TVDEPTH_OUTLIERS_HPP
#define TVDEPTH_OUTLIERS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "tvdepth/dataset.hpp"
#include "tvdepth/depth.hpp"
#include "tvdepth/errors.hpp"
#include "tvdepth/shape.hpp"

namespace tvdepth {

/**
 * @brief Tuning knobs of the two-stage detection procedure.
 *
 * Stage one flags shape outliers below the lower fence of the classical
 * boxplot of the modified shape variations (fence factor `shape_factor`).
 * Stage two removes them and flags magnitude outliers with the functional
 * boxplot on the total variation depths (`central_proportion` deepest
 * curves inflated by `magnitude_factor`).
 */
struct DetectionConfig {
  double shape_factor = 3.0;
  double magnitude_factor = 1.5;
  double central_proportion = 0.5;
  WeightChoice weight = WeightChoice::SampleSd;
};

/// Pointwise band: lower(t) <= upper(t) on every grid point.
struct Envelope {
  std::vector<double> lower;
  std::vector<double> upper;
};

/// Quartile summary of the shape-outlyingness boxplot.
struct BoxplotStats {
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr = 0.0;
  double lower_fence = 0.0;
};

/// Per-curve depth values computed once by detect().
struct DepthProfile {
  std::vector<double> tvd;
  std::vector<double> msv;
};

/**
 * Quantile of a sorted sample by linear interpolation: quantile q sits at
 * fractional position q*(n-1). This is the common statistical default
 * (R type 7), pinned here so fence values are stable.
 */
inline double linear_quantile(std::span<const double> sorted_values, double q) {
  if (sorted_values.empty()) throw DomainError("quantile of empty sample");
  if (!(q >= 0.0 && q <= 1.0)) {
    throw DomainError("quantile level " + std::to_string(q) +
                      " outside [0, 1]");
  }
  const double pos = q * static_cast<double>(sorted_values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = lo + 1 < sorted_values.size() ? lo + 1 : lo;
  const double frac = pos - static_cast<double>(lo);
  return sorted_values[lo] + frac * (sorted_values[hi] - sorted_values[lo]);
}

struct ShapeOutlierResult {
  std::vector<std::size_t> outliers;  ///< ascending curve indices
  BoxplotStats boxplot;
};

/**
 * Stage-one rule: curves whose modified shape variation falls strictly
 * below Q1 - factor*IQR. Only the lower fence flags; large values mean the
 * curve's shape conforms.
 */
inline ShapeOutlierResult shape_outliers(std::span<const double> msv_values,
                                         double factor) {
  if (msv_values.size() < 2) {
    throw InsufficientDataError("shape boxplot needs at least two curves");
  }
  if (!(factor > 0.0)) throw DomainError("shape factor must be positive");
  std::vector<double> sorted(msv_values.begin(), msv_values.end());
  std::sort(sorted.begin(), sorted.end());
  ShapeOutlierResult result;
  result.boxplot.q1 = linear_quantile(sorted, 0.25);
  result.boxplot.q3 = linear_quantile(sorted, 0.75);
  result.boxplot.iqr = result.boxplot.q3 - result.boxplot.q1;
  result.boxplot.lower_fence = result.boxplot.q1 - factor * result.boxplot.iqr;
  for (std::size_t j = 0; j < msv_values.size(); ++j) {
    if (msv_values[j] < result.boxplot.lower_fence) {
      result.outliers.push_back(j);
    }
  }
  return result;
}

struct CentralRegion {
  Envelope envelope;
  std::vector<std::size_t> members;  ///< ascending curve indices
};

/**
 * Envelope of the keep_count deepest non-excluded curves. Depth ties break
 * toward the smaller curve index so the selection is deterministic. If
 * fewer than keep_count curves remain, all of them are used.
 */
inline CentralRegion central_region(const FunctionalDataset& ds,
                                    std::span<const double> depths,
                                    std::size_t keep_count,
                                    const std::vector<bool>& excluded = {}) {
  const std::size_t n = ds.curve_count();
  const std::size_t m = ds.point_count();
  if (depths.size() != n) {
    throw AlignmentError("depth vector has " + std::to_string(depths.size()) +
                         " entries, dataset has " + std::to_string(n));
  }
  if (!excluded.empty() && excluded.size() != n) {
    throw AlignmentError("exclusion mask does not match the curve count");
  }
  if (keep_count < 1) throw DomainError("keep_count must be at least 1");

  std::vector<std::size_t> candidates;
  candidates.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (excluded.empty() || !excluded[j]) candidates.push_back(j);
  }
  if (candidates.empty()) {
    throw InsufficientDataError("central region: every curve is excluded");
  }
  std::sort(candidates.begin(), candidates.end(),
            [&](std::size_t a, std::size_t b) {
              if (depths[a] != depths[b]) return depths[a] > depths[b];
              return a < b;
            });
  candidates.resize(std::min(keep_count, candidates.size()));
  std::sort(candidates.begin(), candidates.end());

  CentralRegion region;
  region.members = candidates;
  region.envelope.lower.assign(m, std::numeric_limits<double>::infinity());
  region.envelope.upper.assign(m, -std::numeric_limits<double>::infinity());
  for (std::size_t j : region.members) {
    const auto row = ds.curve(j);
    for (std::size_t i = 0; i < m; ++i) {
      region.envelope.lower[i] = std::min(region.envelope.lower[i], row[i]);
      region.envelope.upper[i] = std::max(region.envelope.upper[i], row[i]);
    }
  }
  return region;
}

struct MagnitudeOutlierResult {
  std::vector<std::size_t> outliers;  ///< ascending curve indices
  Envelope fences;
};

/**
 * Stage-two rule: inflate the central region pointwise by `factor` times
 * its height and flag every non-excluded curve that escapes the fence at
 * any grid point.
 */
inline MagnitudeOutlierResult magnitude_outliers(
    const FunctionalDataset& ds, const Envelope& region, double factor,
    const std::vector<bool>& excluded = {}) {
  const std::size_t n = ds.curve_count();
  const std::size_t m = ds.point_count();
  if (region.lower.size() != m || region.upper.size() != m) {
    throw AlignmentError("envelope does not match the grid");
  }
  if (!excluded.empty() && excluded.size() != n) {
    throw AlignmentError("exclusion mask does not match the curve count");
  }
  if (!(factor > 0.0)) throw DomainError("magnitude factor must be positive");
  for (std::size_t i = 0; i < m; ++i) {
    if (!(region.lower[i] <= region.upper[i])) {
      throw DomainError("envelope inverted at point " + std::to_string(i));
    }
  }

  MagnitudeOutlierResult result;
  result.fences.lower.resize(m);
  result.fences.upper.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double height = region.upper[i] - region.lower[i];
    result.fences.lower[i] = region.lower[i] - factor * height;
    result.fences.upper[i] = region.upper[i] + factor * height;
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!excluded.empty() && excluded[j]) continue;
    const auto row = ds.curve(j);
    for (std::size_t i = 0; i < m; ++i) {
      if (row[i] < result.fences.lower[i] || row[i] > result.fences.upper[i]) {
        result.outliers.push_back(j);
        break;
      }
    }
  }
  return result;
}

/**
 * @brief Everything the two-stage procedure produces for one dataset.
 *
 * Index sets are ascending and disjoint; median_index is the deepest curve
 * after shape outliers are removed (never itself a shape outlier).
 */
struct OutlierReport {
  std::vector<std::size_t> shape_outliers;
  std::vector<std::size_t> magnitude_outliers;
  std::size_t median_index = 0;
  Envelope central_region;
  Envelope fences;
  DepthProfile depths;
  BoxplotStats msv_boxplot;
};

/**
 * The full detection pipeline:
 *  1. total variation depth and modified shape variation of every curve,
 *  2. shape outliers from the MSV boxplot,
 *  3. central region over the remaining curves (keep count from the
 *     original n),
 *  4. magnitude outliers among the remaining curves via the fences,
 *  5. median = deepest remaining curve.
 */
inline OutlierReport detect(const FunctionalDataset& ds,
                            const DetectionConfig& cfg = {}) {
  const std::size_t n = ds.curve_count();
  if (n < 2) throw InsufficientDataError("detect needs at least two curves");
  if (!(cfg.shape_factor > 0.0) || !(cfg.magnitude_factor > 0.0)) {
    throw DomainError("fence factors must be positive");
  }
  if (!(cfg.central_proportion > 0.0 && cfg.central_proportion <= 1.0)) {
    throw DomainError("central proportion must lie in (0, 1]");
  }

  OutlierReport report;
  report.depths.tvd = total_variation_depths(ds, cfg.weight);
  report.depths.msv = modified_shape_variations(ds);

  ShapeOutlierResult shape = shape_outliers(report.depths.msv,
                                            cfg.shape_factor);
  report.shape_outliers = std::move(shape.outliers);
  report.msv_boxplot = shape.boxplot;

  std::vector<bool> excluded(n, false);
  for (std::size_t j : report.shape_outliers) excluded[j] = true;

  const std::size_t keep_count = static_cast<std::size_t>(
      std::ceil(cfg.central_proportion * static_cast<double>(n)));
  CentralRegion region =
      central_region(ds, report.depths.tvd, keep_count, excluded);
  report.central_region = std::move(region.envelope);

  MagnitudeOutlierResult magnitude = magnitude_outliers(
      ds, report.central_region, cfg.magnitude_factor, excluded);
  report.magnitude_outliers = std::move(magnitude.outliers);
  report.fences = std::move(magnitude.fences);

  std::size_t best = n;
  for (std::size_t j = 0; j < n; ++j) {
    if (excluded[j]) continue;
    if (best == n || report.depths.tvd[j] > report.depths.tvd[best]) best = j;
  }
  report.median_index = best;
  return report;
}

/**
 * @brief Serializable geometry of the functional boxplot figure.
 *
 * data_envelope is the pointwise min/max of the non-outlying curves (the
 * whiskers); with no outliers it equals the data min/max.
 */
struct BoxplotGeometry {
  std::size_t median_index = 0;
  std::vector<double> median_curve;
  Envelope central_region;
  Envelope fences;
  Envelope data_envelope;
  std::vector<std::size_t> shape_outliers;
  std::vector<std::size_t> magnitude_outliers;
  BoxplotStats msv_boxplot;
};

/// Collects the plot geometry of a report produced from the same dataset.
inline BoxplotGeometry boxplot_geometry(const FunctionalDataset& ds,
                                        const OutlierReport& report) {
  const std::size_t n = ds.curve_count();
  const std::size_t m = ds.point_count();
  BoxplotGeometry geometry;
  geometry.median_index = report.median_index;
  const auto median_row = ds.curve(report.median_index);
  geometry.median_curve.assign(median_row.begin(), median_row.end());
  geometry.central_region = report.central_region;
  geometry.fences = report.fences;
  geometry.shape_outliers = report.shape_outliers;
  geometry.magnitude_outliers = report.magnitude_outliers;
  geometry.msv_boxplot = report.msv_boxplot;

  std::vector<bool> outlying(n, false);
  for (std::size_t j : report.shape_outliers) outlying[j] = true;
  for (std::size_t j : report.magnitude_outliers) outlying[j] = true;
  geometry.data_envelope.lower.assign(m,
                                      std::numeric_limits<double>::infinity());
  geometry.data_envelope.upper.assign(
      m, -std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < n; ++j) {
    if (outlying[j]) continue;
    const auto row = ds.curve(j);
    for (std::size_t i = 0; i < m; ++i) {
      geometry.data_envelope.lower[i] =
          std::min(geometry.data_envelope.lower[i], row[i]);
      geometry.data_envelope.upper[i] =
          std::max(geometry.data_envelope.upper[i], row[i]);
    }
  }
  return geometry;
}

}  // namespace tvdepth

#endif  // TVDEPTH_OUTLIERS_HPP
