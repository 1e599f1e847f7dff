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

#ifndef TVDEPTH_TESTS_FIXTURES_HPP
#define TVDEPTH_TESTS_FIXTURES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "tvdepth/dataset.hpp"

namespace tvtest {

inline tvdepth::FunctionalDataset make_dataset(
    std::vector<double> grid, const std::vector<std::vector<double>>& rows) {
  std::vector<double> values;
  for (const auto& row : rows) values.insert(values.end(), row.begin(), row.end());
  return tvdepth::FunctionalDataset(tvdepth::Grid(std::move(grid)),
                                    std::move(values), rows.size());
}

/// Three comonotone constant-slope curves on a two-point grid.
inline tvdepth::FunctionalDataset fix_a() {
  return make_dataset({0.0, 1.0}, {{0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}});
}

/// fix_a plus the curve (3, 3); even sample size.
inline tvdepth::FunctionalDataset fix_b() {
  return make_dataset({0.0, 1.0},
                      {{0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}, {3.0, 3.0}});
}

/// fix_a with its last curve replaced by the magnitude spike (5, 5).
inline tvdepth::FunctionalDataset fix_a_spike() {
  return make_dataset({0.0, 1.0}, {{0.0, 0.0}, {1.0, 1.0}, {5.0, 5.0}});
}

/// Independent brute-force TVD: straight transcription of the estimator,
/// separate from the library's accumulation order.
inline double naive_tvd(const tvdepth::FunctionalDataset& ds,
                        std::span<const double> query,
                        std::span<const double> weights) {
  double depth = 0.0;
  for (std::size_t i = 0; i < ds.point_count(); ++i) {
    std::size_t count = 0;
    for (std::size_t j = 0; j < ds.curve_count(); ++j) {
      if (ds.value(j, i) <= query[i]) ++count;
    }
    const double p =
        static_cast<double>(count) / static_cast<double>(ds.curve_count());
    depth += weights[i] * p * (1.0 - p);
  }
  return depth;
}

/// Brute-force two-curve modified band depth by enumerating all pairs.
inline std::vector<double> naive_mbd(const tvdepth::FunctionalDataset& ds) {
  const std::size_t n = ds.curve_count();
  const std::size_t m = ds.point_count();
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  std::vector<double> depths(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double x = ds.value(j, i);
      std::size_t covered = 0;
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
          const double lo = std::min(ds.value(a, i), ds.value(b, i));
          const double hi = std::max(ds.value(a, i), ds.value(b, i));
          if (lo <= x && x <= hi) ++covered;
        }
      }
      total += static_cast<double>(covered) / pairs;
    }
    depths[j] = total / static_cast<double>(m);
  }
  return depths;
}

/// Spearman rank correlation with average ranks for ties.
inline double spearman(std::span<const double> a, std::span<const double> b) {
  const auto ranks = [](std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });
    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
      i = j + 1;
    }
    return rank;
  };
  const std::vector<double> ra = ranks(a);
  const std::vector<double> rb = ranks(b);
  const std::size_t n = ra.size();
  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_a += ra[i];
    mean_b += rb[i];
  }
  mean_a /= static_cast<double>(n);
  mean_b /= static_cast<double>(n);
  double cov = 0.0, var_a = 0.0, var_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cov += (ra[i] - mean_a) * (rb[i] - mean_b);
    var_a += (ra[i] - mean_a) * (ra[i] - mean_a);
    var_b += (rb[i] - mean_b) * (rb[i] - mean_b);
  }
  return cov / std::sqrt(var_a * var_b);
}

/// Random dataset on a dyadic lattice (values k/16): comparisons stay exact
/// under dyadic shifts and scalings, and ties are common.
inline tvdepth::FunctionalDataset random_lattice_dataset(std::mt19937_64& rng,
                                                         std::size_t max_n = 12,
                                                         std::size_t max_m = 8) {
  std::uniform_int_distribution<std::size_t> n_dist(1, max_n);
  std::uniform_int_distribution<std::size_t> m_dist(2, max_m);
  std::uniform_int_distribution<int> value_dist(-64, 64);
  const std::size_t n = n_dist(rng);
  const std::size_t m = m_dist(rng);
  std::vector<double> values(n * m);
  for (double& v : values) v = static_cast<double>(value_dist(rng)) / 16.0;
  std::vector<double> grid(m);
  for (std::size_t i = 0; i < m; ++i) grid[i] = static_cast<double>(i);
  return tvdepth::FunctionalDataset(tvdepth::Grid(std::move(grid)),
                                    std::move(values), n);
}

/// Random query on the same lattice; half the time a copy of a sample curve.
inline std::vector<double> random_lattice_query(
    const tvdepth::FunctionalDataset& ds, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coin(0, 1);
  if (coin(rng) == 1) {
    std::uniform_int_distribution<std::size_t> pick(0, ds.curve_count() - 1);
    const auto row = ds.curve(pick(rng));
    return {row.begin(), row.end()};
  }
  std::uniform_int_distribution<int> value_dist(-64, 64);
  std::vector<double> query(ds.point_count());
  for (double& v : query) v = static_cast<double>(value_dist(rng)) / 16.0;
  return query;
}

}  // namespace tvtest

#endif  // TVDEPTH_TESTS_FIXTURES_HPP
