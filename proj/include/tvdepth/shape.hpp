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

#ifndef TVDEPTH_SHAPE_HPP
#define TVDEPTH_SHAPE_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tvdepth/dataset.hpp"
#include "tvdepth/depth.hpp"
#include "tvdepth/errors.hpp"
#include "tvdepth/parallel.hpp"

namespace tvdepth {

/**
 * @brief Counting proportions for one adjacent pair of grid points.
 *
 * For the pair (t_{i-1}, t_i) and thresholds (a, b):
 *   prev        = #{j : X_j(t_{i-1}) <= a} / n
 *   cur         = #{j : X_j(t_i) <= b} / n
 *   joint_below = #{j : X_j(t_i) <= b, X_j(t_{i-1}) <= a} / n
 *   joint_above = #{j : X_j(t_i) <= b, X_j(t_{i-1}) >  a} / n
 *
 * Always joint_below + joint_above = cur (one integer count split in two),
 * joint_below <= prev, and joint_above <= 1 - prev.
 */
struct PairProportions {
  double prev = 0.0;
  double cur = 0.0;
  double joint_below = 0.0;
  double joint_above = 0.0;
};

/**
 * Counting proportions at pair index i with explicit thresholds. `i` is the
 * 0-based index of the pair's later point and must satisfy 1 <= i < m.
 */
inline PairProportions pair_proportions_at(const FunctionalDataset& ds,
                                           double prev_threshold,
                                           double cur_threshold,
                                           std::size_t i) {
  const std::size_t m = ds.point_count();
  if (i < 1 || i >= m) {
    throw DomainError("pair index " + std::to_string(i) +
                      " outside [1, " + std::to_string(m - 1) + "]");
  }
  const std::size_t n = ds.curve_count();
  std::size_t prev_count = 0;
  std::size_t below_count = 0;
  std::size_t above_count = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const auto row = ds.curve(j);
    const bool prev_le = row[i - 1] <= prev_threshold;
    const bool cur_le = row[i] <= cur_threshold;
    prev_count += prev_le ? 1 : 0;
    if (cur_le) {
      if (prev_le) {
        ++below_count;
      } else {
        ++above_count;
      }
    }
  }
  const double dn = static_cast<double>(n);
  PairProportions pp;
  pp.prev = static_cast<double>(prev_count) / dn;
  pp.cur = static_cast<double>(below_count + above_count) / dn;
  pp.joint_below = static_cast<double>(below_count) / dn;
  pp.joint_above = static_cast<double>(above_count) / dn;
  return pp;
}

/// Counting proportions of a query curve at pair index i (0-based later point).
inline PairProportions pair_proportions(const FunctionalDataset& ds,
                                        std::span<const double> query,
                                        std::size_t i) {
  detail::require_aligned(ds, query);
  if (i < 1 || i >= query.size()) {
    throw DomainError("pair index " + std::to_string(i) + " outside [1, " +
                      std::to_string(query.size() - 1) + "]");
  }
  return pair_proportions_at(ds, query[i - 1], query[i], i);
}

/**
 * Shape component Var(E[R(t) | R(s)]): the part of the pointwise indicator
 * variance explained by the earlier point. Computed in centered form,
 *   prev * (q1 - cur)^2 + (1 - prev) * (q2 - cur)^2,
 * which is algebraically the plug-in estimator and nonnegative even under
 * rounding. Conditional slices with zero mass contribute zero.
 */
inline double shape_component(const PairProportions& pp) {
  double v = 0.0;
  if (pp.prev > 0.0) {
    const double q1 = pp.joint_below / pp.prev;
    v += pp.prev * (q1 - pp.cur) * (q1 - pp.cur);
  }
  if (pp.prev < 1.0) {
    const double q2 = pp.joint_above / (1.0 - pp.prev);
    v += (1.0 - pp.prev) * (q2 - pp.cur) * (q2 - pp.cur);
  }
  return v;
}

/**
 * Magnitude component E[Var(R(t) | R(s))]: the unexplained remainder.
 * Satisfies shape_component + magnitude_component = cur * (1 - cur).
 */
inline double magnitude_component(const PairProportions& pp) {
  double mv = 0.0;
  if (pp.prev > 0.0) {
    const double q1 = pp.joint_below / pp.prev;
    mv += pp.prev * q1 * (1.0 - q1);
  }
  if (pp.prev < 1.0) {
    const double q2 = pp.joint_above / (1.0 - pp.prev);
    mv += (1.0 - pp.prev) * q2 * (1.0 - q2);
  }
  return mv;
}

/**
 * Shape ratio S(t_i; t_{i-1}) = shape component / total pointwise variance,
 * defined as 1 where the total variance vanishes (cur in {0, 1}). Always
 * in [0, 1].
 */
inline double shape_ratio(const PairProportions& pp) {
  if (pp.cur == 0.0 || pp.cur == 1.0) return 1.0;
  const double total = pp.cur * (1.0 - pp.cur);
  const double ratio = shape_component(pp) / total;
  // The exact ratio is <= 1; trim rounding spill from the division.
  return ratio < 1.0 ? ratio : 1.0;
}

/**
 * Normalized absolute increments of a curve, |f(t_i) - f(t_{i-1})| summed to
 * one over the m-1 adjacent pairs. A constant curve has no increments to
 * normalize and falls back to uniform weights.
 */
inline std::vector<double> increment_weights(std::span<const double> query) {
  if (query.size() < 2) {
    throw DomainError("increment weights need at least two points");
  }
  const std::size_t pairs = query.size() - 1;
  std::vector<double> w(pairs);
  double total = 0.0;
  for (std::size_t i = 0; i < pairs; ++i) {
    w[i] = std::abs(query[i + 1] - query[i]);
    total += w[i];
  }
  if (total <= 0.0) {
    return std::vector<double>(pairs, 1.0 / static_cast<double>(pairs));
  }
  for (double& v : w) v /= total;
  return w;
}

/**
 * Shape variation of a query curve: the increment-weighted average of the
 * per-pair shape ratios, sum_{i>=2} v(t_i) * S_f(t_i; t_{i-1}). Values near 1
 * indicate a trajectory whose pairwise ordering tracks the sample's.
 */
inline double shape_variation(const FunctionalDataset& ds,
                              std::span<const double> query) {
  detail::require_aligned(ds, query);
  const std::vector<double> v = increment_weights(query);
  double acc = 0.0;
  double mass = 0.0;
  for (std::size_t i = 1; i < query.size(); ++i) {
    const double s = shape_ratio(pair_proportions_at(ds, query[i - 1],
                                                     query[i], i));
    acc += v[i - 1] * s;
    mass += v[i - 1];
  }
  return acc / mass;
}

/**
 * Modified shape variation: each value pair is shifted to the pointwise
 * median before the shape ratio is evaluated. The shift at pair index i is
 * delta_i = f(t_i) - median(t_i), subtracted from both pair coordinates so
 * the increment is preserved; the later threshold lands exactly on the
 * median. Increment weights come from the unshifted curve (shifting does
 * not change increments).
 */
inline double modified_shape_variation(const FunctionalDataset& ds,
                                       std::span<const double> query,
                                       std::span<const double> median) {
  detail::require_aligned(ds, query);
  detail::require_aligned(ds, median);
  const std::vector<double> v = increment_weights(query);
  double acc = 0.0;
  double mass = 0.0;
  for (std::size_t i = 1; i < query.size(); ++i) {
    const double delta = query[i] - median[i];
    const double s = shape_ratio(
        pair_proportions_at(ds, query[i - 1] - delta, median[i], i));
    acc += v[i - 1] * s;
    mass += v[i - 1];
  }
  return acc / mass;
}

inline double modified_shape_variation(const FunctionalDataset& ds,
                                       std::span<const double> query) {
  const std::vector<double> median = pointwise_median(ds);
  return modified_shape_variation(ds, query, median);
}

/**
 * Modified shape variation of every sample curve against the full sample.
 *
 * The shift rule lands every pair's later threshold exactly on the
 * pointwise median, so at pair index i all n queries share the same
 * later-point condition X(t_i) <= median(t_i). Sorting the earlier-point
 * values (overall and restricted to that below-median subset) turns each
 * curve's joint counts into two binary searches: O(n m log n) for the whole
 * sample instead of O(n^2 m), with counts identical to the per-curve
 * routine.
 */
inline std::vector<double> modified_shape_variations(
    const FunctionalDataset& ds) {
  const std::size_t n = ds.curve_count();
  const std::size_t m = ds.point_count();
  const std::vector<double> median = pointwise_median(ds);

  std::vector<double> ratios(n * (m - 1));  // curve-major shape ratios
  parallel_for(m - 1, [&](std::size_t pair) {
    const std::size_t i = pair + 1;
    std::vector<double> prev_values(n);
    std::vector<double> prev_below;
    prev_below.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double u = ds.value(k, i - 1);
      prev_values[k] = u;
      if (ds.value(k, i) <= median[i]) prev_below.push_back(u);
    }
    std::sort(prev_values.begin(), prev_values.end());
    std::sort(prev_below.begin(), prev_below.end());
    const std::size_t cur_count = prev_below.size();
    const double dn = static_cast<double>(n);

    for (std::size_t j = 0; j < n; ++j) {
      const double delta = ds.value(j, i) - median[i];
      const double threshold = ds.value(j, i - 1) - delta;
      const auto prev_count = static_cast<std::size_t>(
          std::upper_bound(prev_values.begin(), prev_values.end(), threshold) -
          prev_values.begin());
      const auto below_count = static_cast<std::size_t>(
          std::upper_bound(prev_below.begin(), prev_below.end(), threshold) -
          prev_below.begin());
      PairProportions pp;
      pp.prev = static_cast<double>(prev_count) / dn;
      pp.cur = static_cast<double>(cur_count) / dn;
      pp.joint_below = static_cast<double>(below_count) / dn;
      pp.joint_above = static_cast<double>(cur_count - below_count) / dn;
      ratios[j * (m - 1) + pair] = shape_ratio(pp);
    }
  });

  std::vector<double> out(n);
  parallel_for(n, [&](std::size_t j) {
    const std::vector<double> v = increment_weights(ds.curve(j));
    double acc = 0.0;
    double mass = 0.0;
    for (std::size_t pair = 0; pair + 1 < m; ++pair) {
      acc += v[pair] * ratios[j * (m - 1) + pair];
      mass += v[pair];
    }
    out[j] = acc / mass;
  });
  return out;
}

/// Pointwise diagnostics of one query curve: rank proportions and depths per
/// grid point, shape ratios per adjacent pair.
struct CurveDiagnostics {
  std::vector<double> rank_props;    // length m
  std::vector<double> point_depths;  // length m
  std::vector<double> shape_ratios;  // length m-1
};

inline CurveDiagnostics curve_diagnostics(const FunctionalDataset& ds,
                                          std::span<const double> query) {
  detail::require_aligned(ds, query);
  CurveDiagnostics diag;
  diag.rank_props = rank_proportions(ds, query);
  diag.point_depths = pointwise_depth(diag.rank_props);
  diag.shape_ratios.resize(ds.point_count() - 1);
  for (std::size_t i = 1; i < ds.point_count(); ++i) {
    diag.shape_ratios[i - 1] =
        shape_ratio(pair_proportions_at(ds, query[i - 1], query[i], i));
  }
  return diag;
}

}  // namespace tvdepth

#endif  // TVDEPTH_SHAPE_HPP
