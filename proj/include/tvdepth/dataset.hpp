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

#ifndef TVDEPTH_DATASET_HPP
#define TVDEPTH_DATASET_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tvdepth/errors.hpp"

namespace tvdepth {

/**
 * @brief Shared observation grid t_1 < t_2 < ... < t_m.
 *
 * Grid coordinates are unitless domain values (time, pixel index, ...).
 * Construction validates that the points are finite, strictly increasing,
 * and that there are at least two of them.
 */
class Grid {
 public:
  explicit Grid(std::vector<double> points) : points_(std::move(points)) {
    if (points_.size() < 2) {
      throw DomainError("grid needs at least two points, got " +
                        std::to_string(points_.size()));
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (!std::isfinite(points_[i])) {
        throw DomainError("grid point " + std::to_string(i) + " is not finite");
      }
      if (i > 0 && !(points_[i - 1] < points_[i])) {
        throw DomainError("grid is not strictly increasing at index " +
                          std::to_string(i));
      }
    }
  }

  /// m equally spaced points covering [lo, hi].
  static Grid uniform(std::size_t m, double lo = 0.0, double hi = 1.0) {
    std::vector<double> pts(m);
    for (std::size_t i = 0; i < m; ++i) {
      pts[i] = lo + (hi - lo) * static_cast<double>(i) /
                        static_cast<double>(m - 1);
    }
    return Grid(std::move(pts));
  }

  /// The index grid 0, 1, ..., m-1 (used for flattened images).
  static Grid index(std::size_t m) {
    std::vector<double> pts(m);
    for (std::size_t i = 0; i < m; ++i) pts[i] = static_cast<double>(i);
    return Grid(std::move(pts));
  }

  std::size_t size() const { return points_.size(); }
  double operator[](std::size_t i) const { return points_[i]; }
  const std::vector<double>& points() const { return points_; }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.points_ == b.points_;
  }

 private:
  std::vector<double> points_;
};

/**
 * @brief n sample curves observed on a shared m-point grid.
 *
 * Values are stored row-major: curve j occupies values()[j*m .. j*m+m).
 * The empirical distribution of the rows stands in for the population
 * law F_X in every estimator of this library.
 */
class FunctionalDataset {
 public:
  FunctionalDataset(Grid grid, std::vector<double> values, std::size_t n)
      : grid_(std::move(grid)), values_(std::move(values)), n_(n) {
    if (n_ < 1) throw DomainError("dataset needs at least one curve");
    if (values_.size() != n_ * grid_.size()) {
      throw AlignmentError("value matrix is " + std::to_string(values_.size()) +
                           " entries, expected " +
                           std::to_string(n_ * grid_.size()));
    }
    for (std::size_t k = 0; k < values_.size(); ++k) {
      if (!std::isfinite(values_[k])) {
        throw DomainError("curve " + std::to_string(k / grid_.size()) +
                          " has a non-finite value at point " +
                          std::to_string(k % grid_.size()));
      }
    }
  }

  std::size_t curve_count() const { return n_; }
  std::size_t point_count() const { return grid_.size(); }
  const Grid& grid() const { return grid_; }

  std::span<const double> curve(std::size_t j) const {
    return {values_.data() + j * grid_.size(), grid_.size()};
  }

  double value(std::size_t j, std::size_t i) const {
    return values_[j * grid_.size() + i];
  }

  const std::vector<double>& values() const { return values_; }

 private:
  Grid grid_;
  std::vector<double> values_;
  std::size_t n_;
};

namespace detail {

/// Throws unless the query curve is finite with one value per grid point.
inline void require_aligned(const FunctionalDataset& ds,
                            std::span<const double> query) {
  if (query.size() != ds.point_count()) {
    throw AlignmentError("query has " + std::to_string(query.size()) +
                         " values, grid has " +
                         std::to_string(ds.point_count()));
  }
  for (std::size_t i = 0; i < query.size(); ++i) {
    if (!std::isfinite(query[i])) {
      throw DomainError("query value at point " + std::to_string(i) +
                        " is not finite");
    }
  }
}

}  // namespace detail

}  // namespace tvdepth

#endif  // TVDEPTH_DATASET_HPP
