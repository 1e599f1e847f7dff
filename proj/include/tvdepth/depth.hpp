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

#ifndef TVDEPTH_DEPTH_HPP
#define TVDEPTH_DEPTH_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tvdepth/dataset.hpp"
#include "tvdepth/errors.hpp"
#include "tvdepth/parallel.hpp"

namespace tvdepth {

/// Weight function over grid points used inside the total variation depth.
enum class WeightChoice {
  SampleSd,  ///< proportional to the per-point sample standard deviation
  Uniform    ///< constant 1/m
};

/**
 * Per-point rank proportions of a query curve against the sample:
 * p(t_i) = #{j : X_j(t_i) <= f(t_i)} / n.
 *
 * Comparisons are exact <= on the stored values; a sample curve queried
 * against its own dataset counts itself, so its proportions stay in [1/n, 1].
 */
inline std::vector<double> rank_proportions(const FunctionalDataset& ds,
                                            std::span<const double> query) {
  detail::require_aligned(ds, query);
  const std::size_t n = ds.curve_count();
  const std::size_t m = ds.point_count();
  std::vector<std::size_t> counts(m, 0);
  for (std::size_t j = 0; j < n; ++j) {
    const auto row = ds.curve(j);
    for (std::size_t i = 0; i < m; ++i) {
      counts[i] += row[i] <= query[i] ? 1 : 0;
    }
  }
  std::vector<double> props(m);
  for (std::size_t i = 0; i < m; ++i) {
    props[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
  }
  return props;
}

/**
 * Pointwise depth D(t_i) = p(t_i) * (1 - p(t_i)) from rank proportions.
 * Maximal (1/4) at the pointwise median, zero at the extremes.
 */
inline std::vector<double> pointwise_depth(std::span<const double> proportions) {
  std::vector<double> depth(proportions.size());
  for (std::size_t i = 0; i < proportions.size(); ++i) {
    const double p = proportions[i];
    if (!(p >= 0.0 && p <= 1.0)) {
      throw DomainError("rank proportion " + std::to_string(p) +
                        " at index " + std::to_string(i) +
                        " is outside [0, 1]");
    }
    depth[i] = p * (1.0 - p);
  }
  return depth;
}

/// Per-column sample standard deviation (n-1 denominator). Requires n >= 2.
inline std::vector<double> column_sd(const FunctionalDataset& ds) {
  const std::size_t n = ds.curve_count();
  const std::size_t m = ds.point_count();
  if (n < 2) {
    throw InsufficientDataError(
        "sample standard deviation needs at least two curves");
  }
  std::vector<double> mean(m, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const auto row = ds.curve(j);
    for (std::size_t i = 0; i < m; ++i) mean[i] += row[i];
  }
  for (std::size_t i = 0; i < m; ++i) mean[i] /= static_cast<double>(n);

  std::vector<double> ss(m, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const auto row = ds.curve(j);
    for (std::size_t i = 0; i < m; ++i) {
      const double d = row[i] - mean[i];
      ss[i] += d * d;
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    ss[i] = std::sqrt(ss[i] / static_cast<double>(n - 1));
  }
  return ss;
}

/**
 * Weights proportional to the per-point sample standard deviation,
 * normalized to sum to one. Points where the sample spreads more separate
 * depth values better. Throws DegenerateWeightsError when every column is
 * constant; callers may fall back to uniform_weights.
 */
inline std::vector<double> sd_weights(const FunctionalDataset& ds) {
  std::vector<double> w = column_sd(ds);
  double total = 0.0;
  for (double v : w) total += v;
  if (total <= 0.0) {
    throw DegenerateWeightsError(
        "every grid column is constant; sd weights are undefined");
  }
  for (double& v : w) v /= total;
  return w;
}

/// Constant weights 1/m. The resulting depth matches the modified band
/// depth ranking.
inline std::vector<double> uniform_weights(std::size_t m) {
  if (m < 1) throw DomainError("weight vector needs at least one point");
  return std::vector<double>(m, 1.0 / static_cast<double>(m));
}

/// Resolves a WeightChoice against a dataset.
inline std::vector<double> weights_for(const FunctionalDataset& ds,
                                       WeightChoice choice) {
  return choice == WeightChoice::SampleSd ? sd_weights(ds)
                                          : uniform_weights(ds.point_count());
}

namespace detail {

/// Validates weight alignment, nonnegativity, and unit sum; returns the sum.
inline double checked_weight_sum(std::span<const double> weights,
                                 std::size_t expected_size) {
  if (weights.size() != expected_size) {
    throw AlignmentError("weight vector has " + std::to_string(weights.size()) +
                         " entries, expected " + std::to_string(expected_size));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0)) {
      throw DomainError("weight " + std::to_string(i) + " is negative");
    }
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw DomainError("weights sum to " + std::to_string(total) +
                      ", expected 1");
  }
  return total;
}

}  // namespace detail

/**
 * Total variation depth of a query curve: the weighted average of the
 * pointwise depths, sum_i w(t_i) * D_f(t_i). Weights must be nonnegative
 * and sum to one (within 1e-12); the result lies in [0, 1/4].
 */
inline double total_variation_depth(const FunctionalDataset& ds,
                                    std::span<const double> query,
                                    std::span<const double> weights) {
  const double weight_sum =
      detail::checked_weight_sum(weights, ds.point_count());
  const std::vector<double> props = rank_proportions(ds, query);
  double acc = 0.0;
  for (std::size_t i = 0; i < props.size(); ++i) {
    acc += weights[i] * (props[i] * (1.0 - props[i]));
  }
  // Dividing by the accumulated weight mass keeps the average inside the
  // range of the pointwise depths under rounding.
  return acc / weight_sum;
}

/**
 * Depth of every sample curve against the full sample (self-inclusive).
 * Rank lookups against sorted column copies replace the per-query counting
 * loop, so the whole sample costs O(n m log n) instead of O(n^2 m); the
 * counts, and therefore the results, are identical to calling
 * total_variation_depth per curve.
 */
inline std::vector<double> total_variation_depths(
    const FunctionalDataset& ds, std::span<const double> weights) {
  const double weight_sum =
      detail::checked_weight_sum(weights, ds.point_count());
  const std::size_t n = ds.curve_count();
  const std::size_t m = ds.point_count();

  std::vector<double> sorted_columns(n * m);  // column i at [i*n, (i+1)*n)
  parallel_for(m, [&](std::size_t i) {
    double* column = sorted_columns.data() + i * n;
    for (std::size_t j = 0; j < n; ++j) column[j] = ds.value(j, i);
    std::sort(column, column + n);
  });

  std::vector<double> out(n);
  parallel_for(n, [&](std::size_t j) {
    const auto row = ds.curve(j);
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double* column = sorted_columns.data() + i * n;
      const auto count = static_cast<std::size_t>(
          std::upper_bound(column, column + n, row[i]) - column);
      const double p = static_cast<double>(count) / static_cast<double>(n);
      acc += weights[i] * (p * (1.0 - p));
    }
    out[j] = acc / weight_sum;
  });
  return out;
}

inline std::vector<double> total_variation_depths(const FunctionalDataset& ds,
                                                  WeightChoice choice) {
  const std::vector<double> w = weights_for(ds, choice);
  return total_variation_depths(ds, w);
}

/**
 * Per-point sample median curve. Even sample sizes average the two middle
 * order statistics, so for distinct values the median's rank proportion is
 * exactly 1/2.
 */
inline std::vector<double> pointwise_median(const FunctionalDataset& ds) {
  const std::size_t n = ds.curve_count();
  const std::size_t m = ds.point_count();
  std::vector<double> median(m);
  std::vector<double> column(n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) column[j] = ds.value(j, i);
    const std::size_t halfway = n / 2;
    std::nth_element(column.begin(), column.begin() + halfway, column.end());
    double med = column[halfway];
    if (n % 2 == 0) {
      std::nth_element(column.begin(), column.begin() + halfway - 1,
                       column.end());
      med = (med + column[halfway - 1]) / 2.0;
    }
    median[i] = med;
  }
  return median;
}

}  // namespace tvdepth

#endif  // TVDEPTH_DEPTH_HPP
