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

#ifndef TVDEPTH_SIMULATION_HPP
#define TVDEPTH_SIMULATION_HPP

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "tvdepth/dataset.hpp"
#include "tvdepth/errors.hpp"
#include "tvdepth/outliers.hpp"
#include "tvdepth/parallel.hpp"
#include "tvdepth/rng.hpp"

namespace tvdepth {

/// Stationary covariance evaluated at two grid coordinates.
using CovarianceFn = std::function<double(double, double)>;

/// exp(-|s-t|): the base noise process of the benchmark models.
inline double exponential_covariance(double s, double t) {
  return std::exp(-std::abs(s - t));
}

/// 6*exp(-|s-t|^0.1): the heavy, rough covariance of the Model-5 outliers.
inline double rough_covariance(double s, double t) {
  return 6.0 * std::exp(-std::pow(std::abs(s - t), 0.1));
}

/**
 * @brief Draws zero-mean Gaussian-process curves on a grid.
 *
 * Factors the covariance matrix once (lower-triangular Cholesky with a
 * 1e-10 diagonal jitter) and maps standard-normal vectors through the
 * factor. The covariance must be symmetric positive semi-definite on the
 * grid; if the factorization fails even with jitter, a NumericError is
 * thrown.
 */
class GpSampler {
 public:
  GpSampler(const CovarianceFn& covariance, const Grid& grid,
            double jitter = 1e-10)
      : factor_(grid.size(), grid.size()) {
    const std::size_t m = grid.size();
    Eigen::MatrixXd cov(m, m);
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = 0; b <= a; ++b) {
        const double value = covariance(grid[a], grid[b]);
        cov(a, b) = value;
        cov(b, a) = value;
      }
      cov(a, a) += jitter;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
      throw NumericError(
          "covariance factorization failed despite diagonal jitter");
    }
    factor_ = llt.matrixL();
  }

  std::size_t point_count() const {
    return static_cast<std::size_t>(factor_.rows());
  }

  /// One curve of m correlated values appended through `out`.
  void sample_into(std::span<double> out, std::mt19937_64& rng) const {
    const std::size_t m = point_count();
    std::normal_distribution<double> normal;
    Eigen::VectorXd z(m);
    for (std::size_t i = 0; i < m; ++i) z[static_cast<Eigen::Index>(i)] = normal(rng);
    Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(m)) =
        factor_ * z;
  }

  /// n independent curves, row-major n*m.
  std::vector<double> sample(std::size_t n, std::mt19937_64& rng) const {
    std::vector<double> rows(n * point_count());
    for (std::size_t j = 0; j < n; ++j) {
      sample_into({rows.data() + j * point_count(), point_count()}, rng);
    }
    return rows;
  }

 private:
  Eigen::MatrixXd factor_;
};

/// n*m matrix of independent GP draws; rows are curves.
inline std::vector<double> gp_sample(const CovarianceFn& covariance,
                                     const Grid& grid, std::size_t n,
                                     std::mt19937_64& rng) {
  return GpSampler(covariance, grid).sample(n, rng);
}

/**
 * @brief Parameters of one benchmark dataset.
 *
 * model_id 1 is the clean baseline X(t) = 4t + e(t); models 2-6 contaminate
 * it with shifted, partially shifted, peaked, rough-covariance, and
 * oscillating curves; model 7 uses a sinusoidal base with phase-shifted
 * contamination. Curves live on an equally spaced grid of [0, 1].
 */
struct ModelSpec {
  int model_id = 1;
  std::size_t n = 100;
  std::size_t m = 50;
  double contamination = 0.10;
  std::uint64_t seed = 0;
};

/// Generated curves plus the ground-truth contamination labels.
struct SimulatedDataset {
  FunctionalDataset dataset;
  std::vector<bool> truth;
};

/**
 * Generates the dataset of a ModelSpec. Every curve owns an RNG substream
 * derived from the spec seed and its index, and always consumes three
 * uniforms (contamination flag, sign, window start) before the noise
 * normals; datasets generated from the same seed therefore share noise
 * across models, and contaminated curves differ from their clean
 * counterparts exactly where the model formula says.
 */
inline SimulatedDataset simulate(const ModelSpec& spec) {
  if (spec.model_id < 1 || spec.model_id > 7) {
    throw DomainError("model id " + std::to_string(spec.model_id) +
                      " outside 1..7");
  }
  if (spec.n < 1) throw DomainError("need at least one curve");
  if (spec.m < 2) throw DomainError("need at least two grid points");
  if (!(spec.contamination >= 0.0 && spec.contamination <= 1.0)) {
    throw DomainError("contamination must lie in [0, 1]");
  }

  const Grid grid = Grid::uniform(spec.m);
  const GpSampler base_noise(exponential_covariance, grid);
  std::optional<GpSampler> rough_noise;
  if (spec.model_id == 5) rough_noise.emplace(rough_covariance, grid);

  constexpr double kPeakLength = 0.08;  // Model-4 contamination window
  std::vector<double> values(spec.n * spec.m);
  // Byte-sized flags: vector<bool> packs bits, which is unsafe to write
  // from concurrent workers.
  std::vector<unsigned char> flagged(spec.n, 0);

  parallel_for(spec.n, [&](std::size_t j) {
    std::mt19937_64 rng = make_engine(spec.seed, j);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const bool contaminated = uniform(rng) < spec.contamination;
    const double sign = uniform(rng) < 0.5 ? 1.0 : -1.0;
    const double window_uniform = uniform(rng);

    std::span<double> row(values.data() + j * spec.m, spec.m);
    if (spec.model_id == 5 && contaminated) {
      rough_noise->sample_into(row, rng);
    } else {
      base_noise.sample_into(row, rng);
    }

    const double shift = 6.0 * sign;
    for (std::size_t i = 0; i < spec.m; ++i) {
      const double t = grid[i];
      switch (spec.model_id) {
        case 1:
          row[i] += 4.0 * t;
          break;
        case 2:
          row[i] += 4.0 * t + (contaminated ? shift : 0.0);
          break;
        case 3:
          row[i] += 4.0 * t +
                    (contaminated && t >= window_uniform ? shift : 0.0);
          break;
        case 4: {
          const double start = window_uniform * (1.0 - kPeakLength);
          const bool in_window = t >= start && t <= start + kPeakLength;
          row[i] += 4.0 * t + (contaminated && in_window ? shift : 0.0);
          break;
        }
        case 5:
          row[i] += 4.0 * t;
          break;
        case 6:
          row[i] += 4.0 * t +
                    (contaminated
                         ? 0.5 * std::sin(40.0 * std::numbers::pi * t)
                         : 0.0);
          break;
        case 7:
          row[i] += 2.0 * std::sin(15.0 * std::numbers::pi * t +
                                   (contaminated ? 2.0 : 0.0));
          break;
      }
    }
    flagged[j] = spec.model_id >= 2 && contaminated ? 1 : 0;
  });

  std::vector<bool> truth(spec.n);
  for (std::size_t j = 0; j < spec.n; ++j) truth[j] = flagged[j] != 0;
  return SimulatedDataset{FunctionalDataset(grid, std::move(values), spec.n),
                          std::move(truth)};
}

/**
 * Two-curve modified band depth of every sample curve: the average over
 * grid points of the fraction of curve pairs whose pointwise band contains
 * the curve's value. Counted from pointwise order statistics, O(n log n)
 * per grid point; a pair covers a value it ties with.
 */
inline std::vector<double> modified_band_depths(const FunctionalDataset& ds) {
  const std::size_t n = ds.curve_count();
  const std::size_t m = ds.point_count();
  if (n < 2) {
    throw InsufficientDataError("band depth needs at least two curves");
  }
  const double pair_count = 0.5 * static_cast<double>(n) *
                            static_cast<double>(n - 1);
  std::vector<double> depths(n, 0.0);
  std::vector<double> column(n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) column[j] = ds.value(j, i);
    std::sort(column.begin(), column.end());
    for (std::size_t j = 0; j < n; ++j) {
      const double x = ds.value(j, i);
      const auto strictly_below = static_cast<double>(
          std::lower_bound(column.begin(), column.end(), x) - column.begin());
      const auto strictly_above = static_cast<double>(
          column.end() - std::upper_bound(column.begin(), column.end(), x));
      const double missed = 0.5 * strictly_below * (strictly_below - 1.0) +
                            0.5 * strictly_above * (strictly_above - 1.0);
      depths[j] += 1.0 - missed / pair_count;
    }
  }
  for (double& d : depths) d /= static_cast<double>(m);
  return depths;
}

/// Detection quality against ground truth, in percent. A rate is absent
/// when its denominator is empty (e.g. TPR with no true outliers).
struct Rates {
  std::optional<double> tpr;
  std::optional<double> fpr;
};

inline Rates evaluate(std::span<const std::size_t> detected,
                      const std::vector<bool>& truth) {
  std::size_t true_total = 0;
  for (bool t : truth) true_total += t ? 1 : 0;
  const std::size_t false_total = truth.size() - true_total;

  std::size_t true_hits = 0;
  std::size_t false_hits = 0;
  for (std::size_t j : detected) {
    if (j >= truth.size()) {
      throw DomainError("detected index " + std::to_string(j) +
                        " outside the sample");
    }
    if (truth[j]) {
      ++true_hits;
    } else {
      ++false_hits;
    }
  }

  Rates rates;
  if (true_total > 0) {
    rates.tpr = 100.0 * static_cast<double>(true_hits) /
                static_cast<double>(true_total);
  }
  if (false_total > 0) {
    rates.fpr = 100.0 * static_cast<double>(false_hits) /
                static_cast<double>(false_total);
  }
  return rates;
}

/// Detection rule benchmarked by bench().
enum class Method {
  TvdMsv,     ///< two-stage rule: MSV boxplot then TVD functional boxplot
  MbdFbplot,  ///< functional boxplot on modified band depth, no shape stage
};

inline std::string method_name(Method method) {
  return method == Method::TvdMsv ? "tvd_msv" : "mbd_fbplot";
}

/// All outliers one method flags on one dataset, ascending.
inline std::vector<std::size_t> run_method(const FunctionalDataset& ds,
                                           Method method,
                                           const DetectionConfig& cfg) {
  if (method == Method::TvdMsv) {
    const OutlierReport report = detect(ds, cfg);
    std::vector<std::size_t> flagged;
    flagged.reserve(report.shape_outliers.size() +
                    report.magnitude_outliers.size());
    std::merge(report.shape_outliers.begin(), report.shape_outliers.end(),
               report.magnitude_outliers.begin(),
               report.magnitude_outliers.end(), std::back_inserter(flagged));
    return flagged;
  }
  const std::vector<double> depths = modified_band_depths(ds);
  const std::size_t keep_count = static_cast<std::size_t>(std::ceil(
      cfg.central_proportion * static_cast<double>(ds.curve_count())));
  const CentralRegion region = central_region(ds, depths, keep_count);
  return magnitude_outliers(ds, region.envelope, cfg.magnitude_factor)
      .outliers;
}

/// Mean and spread of the detection rates of one (model, method) pair.
struct BenchRow {
  int model = 0;
  Method method = Method::TvdMsv;
  std::optional<double> tpr_mean;
  std::optional<double> tpr_sd;
  std::optional<double> fpr_mean;
  std::optional<double> fpr_sd;
};

struct BenchTable {
  std::vector<BenchRow> rows;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
};

namespace detail {

/// Mean and sample sd of the present values; absent when none are.
inline std::pair<std::optional<double>, std::optional<double>> mean_sd(
    const std::vector<std::optional<double>>& values) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& v : values) {
    if (v) {
      sum += *v;
      ++count;
    }
  }
  if (count == 0) return {std::nullopt, std::nullopt};
  const double mean = sum / static_cast<double>(count);
  if (count == 1) return {mean, 0.0};
  double ss = 0.0;
  for (const auto& v : values) {
    if (v) {
      const double d = *v - mean;
      ss += d * d;
    }
  }
  return {mean, std::sqrt(ss / static_cast<double>(count - 1))};
}

}  // namespace detail

/**
 * Monte-Carlo benchmark: for every model and repetition, simulate a
 * dataset from a derived seed, run each detection method, and aggregate
 * TPR/FPR in percent as mean and sample sd across repetitions.
 * Repetitions may run concurrently; results are stored by repetition
 * index and aggregated in order, so the table is reproducible bit for bit.
 */
inline BenchTable bench(std::span<const int> models, std::size_t reps,
                        std::uint64_t base_seed, const DetectionConfig& cfg,
                        std::span<const Method> methods, std::size_t n = 100,
                        std::size_t m = 50, double contamination = 0.10) {
  if (reps < 1) throw DomainError("need at least one repetition");
  if (methods.empty()) throw DomainError("need at least one method");

  BenchTable table;
  table.reps = reps;
  table.seed = base_seed;
  for (int model : models) {
    const std::uint64_t model_seed =
        derive_seed(base_seed, static_cast<std::uint64_t>(model));
    std::vector<std::vector<std::optional<double>>> tpr(
        methods.size(), std::vector<std::optional<double>>(reps));
    std::vector<std::vector<std::optional<double>>> fpr = tpr;

    parallel_for(reps, [&](std::size_t rep) {
      ModelSpec spec;
      spec.model_id = model;
      spec.n = n;
      spec.m = m;
      spec.contamination = contamination;
      spec.seed = derive_seed(model_seed, rep);
      const SimulatedDataset sim = simulate(spec);
      for (std::size_t k = 0; k < methods.size(); ++k) {
        const auto flagged = run_method(sim.dataset, methods[k], cfg);
        const Rates rates = evaluate(flagged, sim.truth);
        tpr[k][rep] = rates.tpr;
        fpr[k][rep] = rates.fpr;
      }
    });

    for (std::size_t k = 0; k < methods.size(); ++k) {
      BenchRow row;
      row.model = model;
      row.method = methods[k];
      std::tie(row.tpr_mean, row.tpr_sd) = detail::mean_sd(tpr[k]);
      std::tie(row.fpr_mean, row.fpr_sd) = detail::mean_sd(fpr[k]);
      table.rows.push_back(row);
    }
  }
  return table;
}

}  // namespace tvdepth

#endif  // TVDEPTH_SIMULATION_HPP
