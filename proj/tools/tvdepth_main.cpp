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

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "tvdepth/tvdepth.hpp"

namespace {

using tvdepth::DetectionConfig;
using tvdepth::FunctionalDataset;
using tvdepth::InputDescriptor;
using tvdepth::InputFormat;
using tvdepth::WeightChoice;

/// Flag combinations the parser cannot express; maps to exit code 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

FunctionalDataset read_dataset(const InputDescriptor& input) {
  if (input.path == "-") {
    switch (input.format) {
      case InputFormat::WideCsv:
        return tvdepth::read_wide_csv(std::cin, input.stride);
      case InputFormat::LongCsv:
        if (input.stride > 1) {
          throw UsageError("--stride is not supported for long_csv input");
        }
        return tvdepth::read_long_csv(std::cin);
      case InputFormat::PgmDir:
        throw UsageError("pgm_dir input cannot be read from stdin");
    }
  }
  if (input.format == InputFormat::LongCsv && input.stride > 1) {
    throw UsageError("--stride is not supported for long_csv input");
  }
  return tvdepth::read_input(input);
}

/// Runs `write` against the file at `path`, or stdout when path is "-".
void with_output(const std::string& path,
                 const std::function<void(std::ostream&)>& write) {
  if (path == "-" || path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw tvdepth::IoError("cannot open '" + path + "' for writing");
  write(out);
  if (!out) throw tvdepth::IoError("failed writing '" + path + "'");
}

/// sd weights with the documented fallback: degenerate data warn and use
/// uniform weights instead of failing the run.
WeightChoice resolve_weight_choice(const FunctionalDataset& ds,
                                   WeightChoice requested) {
  if (requested == WeightChoice::SampleSd) {
    try {
      tvdepth::sd_weights(ds);
    } catch (const tvdepth::DegenerateWeightsError&) {
      std::cerr << "tvdepth: warning: every grid column is constant; "
                   "falling back to uniform weights\n";
      return WeightChoice::Uniform;
    }
  }
  return requested;
}

std::vector<int> parse_model_list(const std::string& text) {
  std::vector<int> models;
  const auto add = [&](int model) {
    if (model < 1 || model > 7) {
      throw UsageError("model " + std::to_string(model) + " outside 1..7");
    }
    if (std::find(models.begin(), models.end(), model) == models.end()) {
      models.push_back(model);
    }
  };
  std::size_t begin = 0;
  while (begin <= text.size()) {
    const std::size_t comma = text.find(',', begin);
    const std::string token =
        text.substr(begin, comma == std::string::npos ? std::string::npos
                                                      : comma - begin);
    if (token.empty()) throw UsageError("empty token in --models");
    const std::size_t dash = token.find('-');
    try {
      if (dash == std::string::npos) {
        add(std::stoi(token));
      } else {
        const int lo = std::stoi(token.substr(0, dash));
        const int hi = std::stoi(token.substr(dash + 1));
        if (hi < lo) throw UsageError("descending range in --models");
        for (int k = lo; k <= hi; ++k) add(k);
      }
    } catch (const std::invalid_argument&) {
      throw UsageError("cannot parse --models token '" + token + "'");
    }
    if (comma == std::string::npos) break;
    begin = comma + 1;
  }
  if (models.empty()) throw UsageError("--models selects nothing");
  return models;
}

std::vector<tvdepth::Method> parse_method_list(const std::string& text) {
  std::vector<tvdepth::Method> methods;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    const std::size_t comma = text.find(',', begin);
    const std::string token =
        text.substr(begin, comma == std::string::npos ? std::string::npos
                                                      : comma - begin);
    if (token == "tvd_msv") {
      methods.push_back(tvdepth::Method::TvdMsv);
    } else if (token == "mbd_fbplot") {
      methods.push_back(tvdepth::Method::MbdFbplot);
    } else {
      throw UsageError("unknown method '" + token + "'");
    }
    if (comma == std::string::npos) break;
    begin = comma + 1;
  }
  return methods;
}

void write_bench_csv(const tvdepth::BenchTable& table, std::ostream& out) {
  const auto cell = [](const std::optional<double>& v) {
    return v ? tvdepth::detail::format_number(*v) : std::string();
  };
  out << "model,method,tpr_mean,tpr_sd,fpr_mean,fpr_sd\n";
  for (const auto& row : table.rows) {
    out << row.model << ',' << tvdepth::method_name(row.method) << ','
        << cell(row.tpr_mean) << ',' << cell(row.tpr_sd) << ','
        << cell(row.fpr_mean) << ',' << cell(row.fpr_sd) << '\n';
  }
}

void write_bench_json(const tvdepth::BenchTable& table, std::ostream& out) {
  nlohmann::json rows = nlohmann::json::array();
  const auto cell = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  for (const auto& row : table.rows) {
    rows.push_back({{"model", row.model},
                    {"method", tvdepth::method_name(row.method)},
                    {"tpr_mean", cell(row.tpr_mean)},
                    {"tpr_sd", cell(row.tpr_sd)},
                    {"fpr_mean", cell(row.fpr_mean)},
                    {"fpr_sd", cell(row.fpr_sd)}});
  }
  nlohmann::json j{{"reps", table.reps}, {"seed", table.seed}, {"rows", rows}};
  out << j.dump(2) << '\n';
}

struct CommonInputFlags {
  std::string path = "-";
  std::string format = "wide_csv";
  std::size_t stride = 1;

  void attach(CLI::App* cmd) {
    cmd->add_option("input", path,
                    "Input path ('-' reads a CSV from stdin)");
    cmd->add_option("--format", format, "Input format")
        ->check(CLI::IsMember({"wide_csv", "long_csv", "pgm_dir"}))
        ->capture_default_str();
    cmd->add_option("--stride", stride,
                    "Keep every K-th grid point (columns or pixels)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }

  InputDescriptor descriptor() const {
    return InputDescriptor{tvdepth::format_from_name(format), path, stride};
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Total variation depth, shape variation, and outlier "
               "detection for discretely observed functional data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tvdepth::kVersion);

  // depth
  auto* depth_cmd = app.add_subcommand(
      "depth", "Per-curve total variation depth and modified shape variation");
  CommonInputFlags depth_input;
  depth_input.attach(depth_cmd);
  std::string depth_weight = "sd";
  std::string depth_out = "-";
  depth_cmd->add_option("--weight", depth_weight, "Depth weight function")
      ->check(CLI::IsMember({"sd", "uniform"}))
      ->capture_default_str();
  depth_cmd->add_option("--out", depth_out, "Output CSV path ('-' = stdout)")
      ->capture_default_str();

  // detect
  auto* detect_cmd =
      app.add_subcommand("detect", "Two-stage shape/magnitude outlier report");
  CommonInputFlags detect_input;
  detect_input.attach(detect_cmd);
  DetectionConfig detect_cfg;
  std::string detect_weight = "sd";
  std::string detect_out = "-";
  std::string detect_geometry;
  detect_cmd
      ->add_option("--shape-factor", detect_cfg.shape_factor,
                   "IQR multiplier of the shape boxplot fence")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  detect_cmd
      ->add_option("--mag-factor", detect_cfg.magnitude_factor,
                   "Inflation factor of the functional boxplot fence")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  detect_cmd
      ->add_option("--central", detect_cfg.central_proportion,
                   "Proportion of deepest curves forming the central region")
      ->check(CLI::Range(1e-9, 1.0))
      ->capture_default_str();
  detect_cmd->add_option("--weight", detect_weight, "Depth weight function")
      ->check(CLI::IsMember({"sd", "uniform"}))
      ->capture_default_str();
  detect_cmd->add_option("--geometry", detect_geometry,
                         "Also write functional-boxplot geometry JSON here");
  detect_cmd
      ->add_option("--out", detect_out, "Report JSON path ('-' = stdout)")
      ->capture_default_str();

  // simulate
  auto* simulate_cmd = app.add_subcommand(
      "simulate", "Generate a benchmark dataset with ground-truth labels");
  tvdepth::ModelSpec sim_spec;
  std::string sim_out = "-";
  std::string sim_truth;
  simulate_cmd->add_option("--model", sim_spec.model_id, "Model id (1..7)")
      ->required()
      ->check(CLI::Range(1, 7));
  simulate_cmd->add_option("--n", sim_spec.n, "Number of curves")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate_cmd->add_option("--m", sim_spec.m, "Grid points on [0, 1]")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20))
      ->capture_default_str();
  simulate_cmd
      ->add_option("--contamination", sim_spec.contamination,
                   "Contamination ratio")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  simulate_cmd->add_option("--seed", sim_spec.seed, "Master RNG seed")
      ->capture_default_str();
  simulate_cmd
      ->add_option("--out", sim_out, "Curve CSV path ('-' = stdout)")
      ->capture_default_str();
  simulate_cmd->add_option(
      "--truth", sim_truth,
      "Truth sidecar CSV path (default: <out>.truth.csv when --out is a file)");

  // bench
  auto* bench_cmd = app.add_subcommand(
      "bench", "Monte-Carlo TPR/FPR benchmark over the simulation models");
  std::string bench_models = "1-7";
  std::size_t bench_reps = 200;
  std::uint64_t bench_seed = 0;
  std::string bench_methods = "tvd_msv,mbd_fbplot";
  std::size_t bench_n = 100;
  std::size_t bench_m = 50;
  double bench_contamination = 0.10;
  std::string bench_out = "-";
  bench_cmd->add_option("--models", bench_models, "Models, e.g. 1-7 or 2,4,6")
      ->capture_default_str();
  bench_cmd->add_option("--reps", bench_reps, "Monte-Carlo repetitions")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench_cmd->add_option("--seed", bench_seed, "Master RNG seed")
      ->capture_default_str();
  bench_cmd
      ->add_option("--methods", bench_methods,
                   "Comma-separated subset of tvd_msv,mbd_fbplot")
      ->capture_default_str();
  bench_cmd->add_option("--n", bench_n, "Curves per dataset")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench_cmd->add_option("--m", bench_m, "Grid points per dataset")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20))
      ->capture_default_str();
  bench_cmd
      ->add_option("--contamination", bench_contamination,
                   "Contamination ratio")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  bench_cmd
      ->add_option("--out", bench_out,
                   "Output path ('-' = stdout; *.json writes JSON)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (depth_cmd->parsed()) {
      const FunctionalDataset ds = read_dataset(depth_input.descriptor());
      const WeightChoice choice = resolve_weight_choice(
          ds, depth_weight == "sd" ? WeightChoice::SampleSd
                                   : WeightChoice::Uniform);
      const std::vector<double> tvd =
          tvdepth::total_variation_depths(ds, choice);
      const std::vector<double> msv = tvdepth::modified_shape_variations(ds);
      with_output(depth_out, [&](std::ostream& out) {
        tvdepth::write_depth_table(tvd, msv, out);
      });
    } else if (detect_cmd->parsed()) {
      const InputDescriptor input = detect_input.descriptor();
      const FunctionalDataset ds = read_dataset(input);
      detect_cfg.weight = resolve_weight_choice(
          ds, detect_weight == "sd" ? WeightChoice::SampleSd
                                    : WeightChoice::Uniform);
      const tvdepth::OutlierReport report = tvdepth::detect(ds, detect_cfg);
      tvdepth::ReportMeta meta;
      meta.input = input;
      meta.config = detect_cfg;
      with_output(detect_out, [&](std::ostream& out) {
        tvdepth::write_report(report, meta, out);
      });
      if (!detect_geometry.empty()) {
        tvdepth::write_geometry(tvdepth::boxplot_geometry(ds, report),
                                detect_geometry);
      }
    } else if (simulate_cmd->parsed()) {
      const tvdepth::SimulatedDataset sim = tvdepth::simulate(sim_spec);
      with_output(sim_out, [&](std::ostream& out) {
        tvdepth::write_wide_csv(sim.dataset, out);
      });
      std::string truth_path = sim_truth;
      if (truth_path.empty() && sim_out != "-" && !sim_out.empty()) {
        truth_path = sim_out + ".truth.csv";
      }
      if (!truth_path.empty()) {
        tvdepth::write_truth_csv(sim.truth, truth_path);
      }
    } else if (bench_cmd->parsed()) {
      const std::vector<int> models = parse_model_list(bench_models);
      const std::vector<tvdepth::Method> methods =
          parse_method_list(bench_methods);
      DetectionConfig cfg;
      const tvdepth::BenchTable table =
          tvdepth::bench(models, bench_reps, bench_seed, cfg, methods,
                         bench_n, bench_m, bench_contamination);
      const bool json = bench_out.size() > 5 &&
                        bench_out.substr(bench_out.size() - 5) == ".json";
      with_output(bench_out, [&](std::ostream& out) {
        json ? write_bench_json(table, out) : write_bench_csv(table, out);
      });
    }
  } catch (const UsageError& e) {
    std::cerr << "tvdepth: " << e.what() << "\nRun with --help for usage.\n";
    return 1;
  } catch (const tvdepth::NumericError& e) {
    std::cerr << "tvdepth: numerical error: " << e.what() << '\n';
    return 3;
  } catch (const tvdepth::Error& e) {
    std::cerr << "tvdepth: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "tvdepth: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
