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

#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "tvdepth/io.hpp"

namespace fs = std::filesystem;

namespace {

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout
  std::string errors;  // stderr
};

struct CliHarness {
  fs::path dir;
  CliHarness() {
    dir = fs::temp_directory_path() /
          ("tvdepth_cli_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
  }
  ~CliHarness() { fs::remove_all(dir); }

  std::string file(const std::string& name) const {
    return (dir / name).string();
  }

  CommandResult run(const std::string& args) const {
    const std::string out_path = file("cmd_stdout");
    const std::string err_path = file("cmd_stderr");
    const std::string command = std::string(TVDEPTH_CLI_PATH) + " " + args +
                                " >" + out_path + " 2>" + err_path;
    const int status = std::system(command.c_str());
    CommandResult result;
    result.exit_code = WEXITSTATUS(status);
    const auto slurp = [](const std::string& path) {
      std::ifstream in(path, std::ios::binary);
      std::stringstream buffer;
      buffer << in.rdbuf();
      return buffer.str();
    };
    result.output = slurp(out_path);
    result.errors = slurp(err_path);
    return result;
  }
};

const std::string kSpikeCsv = "0,1\n0,0\n1,1\n5,5\n";

}  // namespace

TEST_CASE("cli detect flags the spike curve") {
  CliHarness cli;
  std::ofstream(cli.file("spike.csv")) << kSpikeCsv;
  const auto result = cli.run("detect " + cli.file("spike.csv"));
  REQUIRE(result.exit_code == 0);
  const auto report = nlohmann::json::parse(result.output);
  REQUIRE(report["magnitude_outliers"] == nlohmann::json::array({2}));
  REQUIRE(report["shape_outliers"].empty());
  REQUIRE(report["meta"]["config"]["shape_factor"] == 3.0);
}

TEST_CASE("cli detect writes report and geometry files") {
  CliHarness cli;
  std::ofstream(cli.file("spike.csv")) << kSpikeCsv;
  const auto result = cli.run("detect " + cli.file("spike.csv") + " --out " +
                              cli.file("report.json") + " --geometry " +
                              cli.file("geometry.json"));
  REQUIRE(result.exit_code == 0);
  const auto [report, meta] = tvdepth::read_report(cli.file("report.json"));
  REQUIRE(report.magnitude_outliers == std::vector<std::size_t>{2});
  REQUIRE(meta.input.format == tvdepth::InputFormat::WideCsv);

  std::ifstream geometry_in(cli.file("geometry.json"));
  nlohmann::json geometry;
  geometry_in >> geometry;
  REQUIRE(geometry["median_index"] == 0);
}

TEST_CASE("cli depth prints the per-curve table") {
  CliHarness cli;
  std::ofstream(cli.file("spike.csv")) << kSpikeCsv;
  const auto result =
      cli.run("depth " + cli.file("spike.csv") + " --weight uniform");
  REQUIRE(result.exit_code == 0);
  REQUIRE(result.output.rfind("curve,tvd,msv\n", 0) == 0);
  REQUIRE(result.output.find("\n0,") != std::string::npos);
  REQUIRE(result.output.find("\n2,0,") != std::string::npos);  // spike depth 0
}

TEST_CASE("cli exit codes distinguish failure classes") {
  CliHarness cli;
  SECTION("unknown flag is a usage error") {
    const auto result = cli.run("detect --no-such-flag");
    REQUIRE(result.exit_code == 1);
    REQUIRE(!result.errors.empty());
  }
  SECTION("missing subcommand is a usage error") {
    REQUIRE(cli.run("").exit_code == 1);
  }
  SECTION("help exits cleanly") {
    const auto result = cli.run("--help");
    REQUIRE(result.exit_code == 0);
    REQUIRE(result.output.find("depth") != std::string::npos);
  }
  SECTION("malformed data is a data error") {
    std::ofstream(cli.file("bad.csv")) << "0,1\n1,not_a_number\n";
    REQUIRE(cli.run("detect " + cli.file("bad.csv")).exit_code == 2);
  }
  SECTION("missing file is a data error") {
    REQUIRE(cli.run("detect " + cli.file("missing.csv")).exit_code == 2);
  }
}

TEST_CASE("cli simulate writes curves plus the truth sidecar") {
  CliHarness cli;
  const std::string out = cli.file("model4.csv");
  const auto result =
      cli.run("simulate --model 4 --seed 1 --out " + out);
  REQUIRE(result.exit_code == 0);
  const auto ds = tvdepth::read_wide_csv(out);
  REQUIRE(ds.curve_count() == 100);
  REQUIRE(ds.point_count() == 50);
  const auto truth = tvdepth::read_truth_csv(out + ".truth.csv");
  REQUIRE(truth.size() == 100);
}

TEST_CASE("cli simulate output pipes into detect") {
  CliHarness cli;
  const std::string sim_cmd = std::string(TVDEPTH_CLI_PATH) +
                              " simulate --model 4 --seed 3 --truth " +
                              cli.file("truth.csv");
  const std::string detect_cmd = std::string(TVDEPTH_CLI_PATH) +
                                 " detect - >" + cli.file("report.json");
  const int status =
      std::system((sim_cmd + " | " + detect_cmd).c_str());
  REQUIRE(WEXITSTATUS(status) == 0);

  std::ifstream in(cli.file("report.json"));
  nlohmann::json report;
  in >> report;
  const auto truth = tvdepth::read_truth_csv(cli.file("truth.csv"));
  std::vector<std::size_t> expected;
  for (std::size_t j = 0; j < truth.size(); ++j) {
    if (truth[j]) expected.push_back(j);
  }
  std::vector<std::size_t> flagged;
  for (const auto& j : report["shape_outliers"]) {
    flagged.push_back(j.get<std::size_t>());
  }
  for (const auto& j : report["magnitude_outliers"]) {
    flagged.push_back(j.get<std::size_t>());
  }
  std::sort(flagged.begin(), flagged.end());
  REQUIRE(flagged == expected);
}

TEST_CASE("cli outputs are byte-reproducible under a fixed seed") {
  CliHarness cli;
  const auto read_bytes = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
  };
  REQUIRE(cli.run("simulate --model 6 --seed 11 --out " + cli.file("a.csv"))
              .exit_code == 0);
  REQUIRE(cli.run("simulate --model 6 --seed 11 --out " + cli.file("b.csv"))
              .exit_code == 0);
  REQUIRE(read_bytes(cli.file("a.csv")) == read_bytes(cli.file("b.csv")));

  REQUIRE(cli.run("detect " + cli.file("a.csv") + " --out " +
                  cli.file("report_a.json"))
              .exit_code == 0);
  REQUIRE(cli.run("detect " + cli.file("b.csv") + " --out " +
                  cli.file("report_b.json"))
              .exit_code == 0);
  const std::string report_a = read_bytes(cli.file("report_a.json"));
  std::string report_b = read_bytes(cli.file("report_b.json"));
  // reports embed the input path; normalize it before comparing
  const std::string needle_b = cli.file("b.csv");
  const std::string needle_a = cli.file("a.csv");
  const auto pos = report_b.find(needle_b);
  REQUIRE(pos != std::string::npos);
  report_b.replace(pos, needle_b.size(), needle_a);
  REQUIRE(report_a == report_b);
}

TEST_CASE("cli bench emits the benchmark table") {
  CliHarness cli;
  const auto result = cli.run(
      "bench --models 4 --reps 3 --seed 5 --methods tvd_msv --n 40 --m 20");
  REQUIRE(result.exit_code == 0);
  REQUIRE(result.output.rfind("model,method,tpr_mean,tpr_sd,fpr_mean,fpr_sd\n",
                              0) == 0);
  REQUIRE(result.output.find("4,tvd_msv,") != std::string::npos);

  const auto json_result = cli.run(
      "bench --models 4 --reps 3 --seed 5 --methods tvd_msv --n 40 --m 20 "
      "--out " +
      cli.file("bench.json"));
  REQUIRE(json_result.exit_code == 0);
  std::ifstream in(cli.file("bench.json"));
  nlohmann::json table;
  in >> table;
  REQUIRE(table["reps"] == 3);
  REQUIRE(table["rows"][0]["model"] == 4);
}

TEST_CASE("cli reads the other input formats") {
  CliHarness cli;
  SECTION("long csv from stdin") {
    std::ofstream(cli.file("long.csv"))
        << "curve_id,t,value\na,0,0\na,1,0\nb,0,1\nb,1,1\nc,0,2\nc,1,2\n";
    const std::string command = std::string("cat ") + cli.file("long.csv") +
                                " | " + TVDEPTH_CLI_PATH +
                                " depth - --format long_csv --weight uniform >" +
                                cli.file("table.csv");
    REQUIRE(WEXITSTATUS(std::system(command.c_str())) == 0);
    std::ifstream in(cli.file("table.csv"));
    std::string header;
    std::getline(in, header);
    REQUIRE(header == "curve,tvd,msv");
  }
  SECTION("pgm directory") {
    std::filesystem::create_directories(cli.file("frames"));
    std::ofstream(cli.file("frames/f0.pgm")) << "P2\n2 2\n255\n1 2 3 4\n";
    std::ofstream(cli.file("frames/f1.pgm")) << "P2\n2 2\n255\n5 6 7 8\n";
    std::ofstream(cli.file("frames/f2.pgm")) << "P2\n2 2\n255\n2 3 4 5\n";
    const auto result = cli.run("depth " + cli.file("frames") +
                                " --format pgm_dir --weight uniform");
    REQUIRE(result.exit_code == 0);
    REQUIRE(result.output.find("\n1,") != std::string::npos);
  }
  SECTION("stride with long csv is rejected as usage") {
    std::ofstream(cli.file("long.csv"))
        << "curve_id,t,value\na,0,0\na,1,0\n";
    const auto result = cli.run("depth " + cli.file("long.csv") +
                                " --format long_csv --stride 2");
    REQUIRE(result.exit_code == 1);
  }
}

TEST_CASE("cli bench leaves TPR empty when no outliers exist") {
  CliHarness cli;
  const auto result = cli.run(
      "bench --models 1 --reps 2 --seed 4 --methods tvd_msv --n 30 --m 12");
  REQUIRE(result.exit_code == 0);
  REQUIRE(result.output.find("\n1,tvd_msv,,,") != std::string::npos);
}

TEST_CASE("cli degenerate sd weights fall back to uniform with a warning") {
  CliHarness cli;
  std::ofstream(cli.file("flat.csv")) << "0,1\n2,2\n2,2\n2,2\n";
  const auto result = cli.run("detect " + cli.file("flat.csv"));
  REQUIRE(result.exit_code == 0);
  REQUIRE(result.errors.find("uniform") != std::string::npos);
  const auto report = nlohmann::json::parse(result.output);
  REQUIRE(report["meta"]["config"]["weight"] == "uniform");
}
