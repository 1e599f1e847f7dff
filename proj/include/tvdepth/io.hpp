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

#ifndef TVDEPTH_IO_HPP
#define TVDEPTH_IO_HPP

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tvdepth/dataset.hpp"
#include "tvdepth/errors.hpp"
#include "tvdepth/outliers.hpp"
#include "tvdepth/version.hpp"

namespace tvdepth {

enum class InputFormat { WideCsv, LongCsv, PgmDir };

inline std::string format_name(InputFormat format) {
  switch (format) {
    case InputFormat::WideCsv: return "wide_csv";
    case InputFormat::LongCsv: return "long_csv";
    case InputFormat::PgmDir: return "pgm_dir";
  }
  return "wide_csv";
}

inline InputFormat format_from_name(std::string_view name) {
  if (name == "wide_csv") return InputFormat::WideCsv;
  if (name == "long_csv") return InputFormat::LongCsv;
  if (name == "pgm_dir") return InputFormat::PgmDir;
  throw DomainError("unknown input format '" + std::string(name) + "'");
}

/// Where and how to read curves. A stride of K keeps every K-th grid point.
struct InputDescriptor {
  InputFormat format = InputFormat::WideCsv;
  std::string path;
  std::size_t stride = 1;
};

namespace detail {

/// Shortest decimal text that parses back to exactly the same double.
inline void append_number(std::string& out, double value) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  out.append(buffer, result.ptr);
}

inline std::string format_number(double value) {
  std::string out;
  append_number(out, value);
  return out;
}

inline std::string_view trim(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) {
    text.remove_prefix(1);
  }
  while (!text.empty() &&
         (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  return text;
}

inline std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t begin = 0;
  while (true) {
    const std::size_t comma = line.find(',', begin);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(begin)));
      break;
    }
    cells.push_back(trim(line.substr(begin, comma - begin)));
    begin = comma + 1;
  }
  return cells;
}

inline double parse_cell(std::string_view cell, std::size_t line_number,
                         std::size_t column_number) {
  const std::string_view trimmed = trim(cell);
  double value = 0.0;
  const auto result = std::from_chars(trimmed.data(),
                                      trimmed.data() + trimmed.size(), value);
  if (result.ec != std::errc() || result.ptr != trimmed.data() + trimmed.size() ||
      trimmed.empty()) {
    throw ParseError("line " + std::to_string(line_number) + ", column " +
                     std::to_string(column_number) + ": cannot parse '" +
                     std::string(trimmed) + "' as a number");
  }
  return value;
}

/// Keeps indices 0, stride, 2*stride, ... of a row.
template <typename T>
std::vector<T> subsample(const std::vector<T>& row, std::size_t stride) {
  if (stride <= 1) return row;
  std::vector<T> kept;
  kept.reserve(row.size() / stride + 1);
  for (std::size_t i = 0; i < row.size(); i += stride) kept.push_back(row[i]);
  return kept;
}

}  // namespace detail

/**
 * Wide CSV: the header row holds the grid coordinates (strictly increasing
 * numbers) and each subsequent row holds one curve. A stride of K keeps
 * every K-th column of both.
 */
inline FunctionalDataset read_wide_csv(std::istream& in,
                                       std::size_t stride = 1) {
  if (stride < 1) throw DomainError("stride must be at least 1");
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty input: no header row");

  const auto header_cells = detail::split_cells(line);
  std::vector<double> grid_points(header_cells.size());
  for (std::size_t i = 0; i < header_cells.size(); ++i) {
    grid_points[i] = detail::parse_cell(header_cells[i], 1, i + 1);
    if (i > 0 && !(grid_points[i - 1] < grid_points[i])) {
      throw ParseError("line 1, column " + std::to_string(i + 1) +
                       ": header is not strictly increasing");
    }
  }
  const std::size_t m = grid_points.size();

  std::vector<double> values;
  std::size_t n = 0;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_cells(line);
    if (cells.size() != m) {
      throw ParseError("line " + std::to_string(line_number) + ": row has " +
                       std::to_string(cells.size()) + " cells, header has " +
                       std::to_string(m));
    }
    std::vector<double> row(m);
    for (std::size_t i = 0; i < m; ++i) {
      row[i] = detail::parse_cell(cells[i], line_number, i + 1);
    }
    const auto kept = detail::subsample(row, stride);
    values.insert(values.end(), kept.begin(), kept.end());
    ++n;
  }
  if (n == 0) throw ParseError("no curve rows after the header");
  return FunctionalDataset(Grid(detail::subsample(grid_points, stride)),
                           std::move(values), n);
}

inline FunctionalDataset read_wide_csv(const std::string& path,
                                       std::size_t stride = 1) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return read_wide_csv(in, stride);
}

/**
 * Long CSV with header `curve_id,t,value`: one observation per row. Curves
 * are ordered by first appearance of their id; the grid is the sorted set
 * of distinct t values, and every curve must cover it exactly once.
 */
inline FunctionalDataset read_long_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty input: no header row");
  {
    const auto header = detail::split_cells(line);
    if (header.size() != 3 || header[0] != "curve_id" || header[1] != "t" ||
        header[2] != "value") {
      throw ParseError("line 1: expected header 'curve_id,t,value'");
    }
  }

  std::vector<std::string> curve_order;
  std::map<std::string, std::map<double, double>> curves;
  std::vector<double> grid_points;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_cells(line);
    if (cells.size() != 3) {
      throw ParseError("line " + std::to_string(line_number) +
                       ": expected 3 cells, got " +
                       std::to_string(cells.size()));
    }
    const std::string id(cells[0]);
    const double t = detail::parse_cell(cells[1], line_number, 2);
    const double value = detail::parse_cell(cells[2], line_number, 3);
    auto [entry, inserted] = curves.try_emplace(id);
    if (inserted) curve_order.push_back(id);
    if (!entry->second.emplace(t, value).second) {
      throw ParseError("line " + std::to_string(line_number) +
                       ": duplicate cell for curve '" + id + "' at t=" +
                       detail::format_number(t));
    }
    grid_points.push_back(t);
  }
  if (curve_order.empty()) throw ParseError("no observations after the header");
  std::sort(grid_points.begin(), grid_points.end());
  grid_points.erase(std::unique(grid_points.begin(), grid_points.end()),
                    grid_points.end());

  std::vector<double> values;
  values.reserve(curve_order.size() * grid_points.size());
  for (const std::string& id : curve_order) {
    const auto& samples = curves[id];
    if (samples.size() != grid_points.size()) {
      throw ParseError("curve '" + id + "' covers " +
                       std::to_string(samples.size()) + " of " +
                       std::to_string(grid_points.size()) + " grid points");
    }
    for (const auto& [t, value] : samples) values.push_back(value);
  }
  return FunctionalDataset(Grid(std::move(grid_points)), std::move(values),
                           curve_order.size());
}

inline FunctionalDataset read_long_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return read_long_csv(in);
}

namespace detail {

struct PgmImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> pixels;  // row-major
};

inline PgmImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());

  std::size_t pos = 0;
  const auto skip_separators = [&] {
    while (pos < bytes.size()) {
      const char c = bytes[pos];
      if (c == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        ++pos;
      } else {
        break;
      }
    }
  };
  const auto next_token = [&]() -> std::string {
    skip_separators();
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(
                                     bytes[pos]))) {
      ++pos;
    }
    if (start == pos) throw ParseError("'" + path + "': truncated PGM header");
    return bytes.substr(start, pos - start);
  };
  const auto next_size = [&]() -> std::size_t {
    const std::string token = next_token();
    std::size_t value = 0;
    const auto result =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (result.ec != std::errc() || result.ptr != token.data() + token.size()) {
      throw ParseError("'" + path + "': bad PGM header token '" + token + "'");
    }
    return value;
  };

  const std::string magic = next_token();
  if (magic != "P2" && magic != "P5") {
    throw ParseError("'" + path + "': not a PGM file (magic '" + magic + "')");
  }
  PgmImage image;
  image.width = next_size();
  image.height = next_size();
  const std::size_t maxval = next_size();
  constexpr std::size_t kMaxSide = std::size_t{1} << 20;
  constexpr std::size_t kMaxPixels = std::size_t{1} << 26;
  if (image.width == 0 || image.height == 0 || maxval == 0 || maxval > 65535 ||
      image.width > kMaxSide || image.height > kMaxSide ||
      image.width * image.height > kMaxPixels) {
    throw ParseError("'" + path + "': invalid PGM dimensions or maxval");
  }
  const std::size_t count = image.width * image.height;
  image.pixels.resize(count);

  if (magic == "P2") {
    for (std::size_t k = 0; k < count; ++k) {
      image.pixels[k] = static_cast<double>(next_size());
    }
  } else {
    ++pos;  // single whitespace byte after maxval
    const std::size_t bytes_per_pixel = maxval < 256 ? 1 : 2;
    if (pos + count * bytes_per_pixel > bytes.size()) {
      throw ParseError("'" + path + "': truncated PGM pixel data");
    }
    for (std::size_t k = 0; k < count; ++k) {
      const auto hi = static_cast<unsigned char>(bytes[pos]);
      if (bytes_per_pixel == 1) {
        image.pixels[k] = static_cast<double>(hi);
        ++pos;
      } else {
        const auto lo = static_cast<unsigned char>(bytes[pos + 1]);
        image.pixels[k] = static_cast<double>(hi * 256 + lo);
        pos += 2;
      }
    }
  }
  return image;
}

}  // namespace detail

/**
 * Directory of equal-sized PGM images (P2 or P5), visited in lexicographic
 * filename order. Each image is flattened row-major into one curve; the
 * grid is the original pixel index of every retained pixel, so a stride of
 * K keeps pixels 0, K, 2K, ...
 */
inline FunctionalDataset read_pgm_dir(const std::string& path,
                                      std::size_t stride = 1) {
  if (stride < 1) throw DomainError("stride must be at least 1");
  namespace fs = std::filesystem;
  if (!fs::is_directory(path)) {
    throw IoError("'" + path + "' is not a readable directory");
  }
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == ".pgm") names.push_back(entry.path().string());
  }
  if (names.empty()) {
    throw ParseError("no .pgm files in directory '" + path + "'");
  }
  std::sort(names.begin(), names.end());

  std::vector<double> values;
  std::size_t width = 0;
  std::size_t height = 0;
  for (std::size_t j = 0; j < names.size(); ++j) {
    const detail::PgmImage image = detail::read_pgm(names[j]);
    if (j == 0) {
      width = image.width;
      height = image.height;
    } else if (image.width != width || image.height != height) {
      throw ParseError("'" + names[j] + "' is " + std::to_string(image.width) +
                       "x" + std::to_string(image.height) + ", expected " +
                       std::to_string(width) + "x" + std::to_string(height));
    }
    const auto kept = detail::subsample(image.pixels, stride);
    values.insert(values.end(), kept.begin(), kept.end());
  }

  std::vector<double> grid_points;
  for (std::size_t k = 0; k < width * height; k += stride) {
    grid_points.push_back(static_cast<double>(k));
  }
  return FunctionalDataset(Grid(std::move(grid_points)), std::move(values),
                           names.size());
}

/// Dispatches on the descriptor's format.
inline FunctionalDataset read_input(const InputDescriptor& input) {
  switch (input.format) {
    case InputFormat::WideCsv:
      return read_wide_csv(input.path, input.stride);
    case InputFormat::LongCsv:
      if (input.stride > 1) {
        throw DomainError("stride is not supported for long_csv input");
      }
      return read_long_csv(input.path);
    case InputFormat::PgmDir:
      return read_pgm_dir(input.path, input.stride);
  }
  throw DomainError("unknown input format");
}

/// Wide CSV writer; numbers are written so they re-read bit-identically.
inline void write_wide_csv(const FunctionalDataset& ds, std::ostream& out) {
  std::string line;
  for (std::size_t i = 0; i < ds.point_count(); ++i) {
    if (i > 0) line.push_back(',');
    detail::append_number(line, ds.grid()[i]);
  }
  line.push_back('\n');
  out << line;
  for (std::size_t j = 0; j < ds.curve_count(); ++j) {
    line.clear();
    const auto row = ds.curve(j);
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) line.push_back(',');
      detail::append_number(line, row[i]);
    }
    line.push_back('\n');
    out << line;
  }
}

inline void write_wide_csv(const FunctionalDataset& ds,
                           const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_wide_csv(ds, out);
  if (!out) throw IoError("failed writing '" + path + "'");
}

/// Ground-truth sidecar: `curve_id,is_outlier` with 0-based ids.
inline void write_truth_csv(const std::vector<bool>& truth,
                            std::ostream& out) {
  out << "curve_id,is_outlier\n";
  for (std::size_t j = 0; j < truth.size(); ++j) {
    out << j << ',' << (truth[j] ? 1 : 0) << '\n';
  }
}

inline void write_truth_csv(const std::vector<bool>& truth,
                            const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_truth_csv(truth, out);
  if (!out) throw IoError("failed writing '" + path + "'");
}

/// Truth sidecar reader (curve_id,is_outlier).
inline std::vector<bool> read_truth_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::string line;
  if (!std::getline(in, line) ||
      detail::trim(line) != "curve_id,is_outlier") {
    throw ParseError("'" + path + "': expected header 'curve_id,is_outlier'");
  }
  std::vector<bool> truth;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_cells(line);
    if (cells.size() != 2) {
      throw ParseError("line " + std::to_string(line_number) +
                       ": expected 2 cells");
    }
    truth.push_back(detail::parse_cell(cells[1], line_number, 2) != 0.0);
  }
  return truth;
}

/// Per-curve depth table: `curve,tvd,msv` with 0-based curve ids.
inline void write_depth_table(std::span<const double> tvd,
                              std::span<const double> msv, std::ostream& out) {
  if (tvd.size() != msv.size()) {
    throw AlignmentError("tvd and msv tables have different lengths");
  }
  out << "curve,tvd,msv\n";
  for (std::size_t j = 0; j < tvd.size(); ++j) {
    std::string line = std::to_string(j);
    line.push_back(',');
    detail::append_number(line, tvd[j]);
    line.push_back(',');
    detail::append_number(line, msv[j]);
    line.push_back('\n');
    out << line;
  }
}

/// Provenance recorded next to a detection report.
struct ReportMeta {
  InputDescriptor input;
  DetectionConfig config;
  std::string version = kVersion;
  std::optional<std::uint64_t> seed;
};

namespace detail {

inline nlohmann::json envelope_to_json(const Envelope& envelope) {
  return {{"lower", envelope.lower}, {"upper", envelope.upper}};
}

inline Envelope envelope_from_json(const nlohmann::json& j) {
  Envelope envelope;
  envelope.lower = j.at("lower").get<std::vector<double>>();
  envelope.upper = j.at("upper").get<std::vector<double>>();
  return envelope;
}

}  // namespace detail

inline nlohmann::json report_to_json(const OutlierReport& report,
                                     const ReportMeta& meta) {
  nlohmann::json j;
  j["shape_outliers"] = report.shape_outliers;
  j["magnitude_outliers"] = report.magnitude_outliers;
  j["median_index"] = report.median_index;
  j["tvd"] = report.depths.tvd;
  j["msv"] = report.depths.msv;
  j["central_region"] = detail::envelope_to_json(report.central_region);
  j["fences"] = detail::envelope_to_json(report.fences);
  j["msv_boxplot"] = {{"q1", report.msv_boxplot.q1},
                      {"q3", report.msv_boxplot.q3},
                      {"iqr", report.msv_boxplot.iqr},
                      {"lower_fence", report.msv_boxplot.lower_fence}};
  nlohmann::json meta_json;
  meta_json["input"] = {{"format", format_name(meta.input.format)},
                        {"path", meta.input.path},
                        {"stride", meta.input.stride}};
  meta_json["config"] = {
      {"shape_factor", meta.config.shape_factor},
      {"magnitude_factor", meta.config.magnitude_factor},
      {"central_proportion", meta.config.central_proportion},
      {"weight",
       meta.config.weight == WeightChoice::SampleSd ? "sd" : "uniform"}};
  meta_json["version"] = meta.version;
  if (meta.seed) {
    meta_json["seed"] = *meta.seed;
  } else {
    meta_json["seed"] = nullptr;
  }
  j["meta"] = meta_json;
  return j;
}

inline std::pair<OutlierReport, ReportMeta> report_from_json(
    const nlohmann::json& j) {
  OutlierReport report;
  report.shape_outliers = j.at("shape_outliers").get<std::vector<std::size_t>>();
  report.magnitude_outliers =
      j.at("magnitude_outliers").get<std::vector<std::size_t>>();
  report.median_index = j.at("median_index").get<std::size_t>();
  report.depths.tvd = j.at("tvd").get<std::vector<double>>();
  report.depths.msv = j.at("msv").get<std::vector<double>>();
  report.central_region = detail::envelope_from_json(j.at("central_region"));
  report.fences = detail::envelope_from_json(j.at("fences"));
  const auto& box = j.at("msv_boxplot");
  report.msv_boxplot.q1 = box.at("q1").get<double>();
  report.msv_boxplot.q3 = box.at("q3").get<double>();
  report.msv_boxplot.iqr = box.at("iqr").get<double>();
  report.msv_boxplot.lower_fence = box.at("lower_fence").get<double>();

  ReportMeta meta;
  const auto& meta_json = j.at("meta");
  meta.input.format =
      format_from_name(meta_json.at("input").at("format").get<std::string>());
  meta.input.path = meta_json.at("input").at("path").get<std::string>();
  meta.input.stride = meta_json.at("input").at("stride").get<std::size_t>();
  const auto& config = meta_json.at("config");
  meta.config.shape_factor = config.at("shape_factor").get<double>();
  meta.config.magnitude_factor = config.at("magnitude_factor").get<double>();
  meta.config.central_proportion =
      config.at("central_proportion").get<double>();
  meta.config.weight = config.at("weight").get<std::string>() == "sd"
                           ? WeightChoice::SampleSd
                           : WeightChoice::Uniform;
  meta.version = meta_json.at("version").get<std::string>();
  if (!meta_json.at("seed").is_null()) {
    meta.seed = meta_json.at("seed").get<std::uint64_t>();
  }
  return {std::move(report), std::move(meta)};
}

inline void write_report(const OutlierReport& report, const ReportMeta& meta,
                         std::ostream& out) {
  out << report_to_json(report, meta).dump(2) << '\n';
}

inline void write_report(const OutlierReport& report, const ReportMeta& meta,
                         const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_report(report, meta, out);
  if (!out) throw IoError("failed writing '" + path + "'");
}

inline std::pair<OutlierReport, ReportMeta> read_report(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  nlohmann::json j;
  in >> j;
  return report_from_json(j);
}

inline nlohmann::json geometry_to_json(const BoxplotGeometry& geometry) {
  nlohmann::json j;
  j["median_index"] = geometry.median_index;
  j["median"] = geometry.median_curve;
  j["central_region"] = detail::envelope_to_json(geometry.central_region);
  j["fences"] = detail::envelope_to_json(geometry.fences);
  j["envelope"] = detail::envelope_to_json(geometry.data_envelope);
  j["shape_outliers"] = geometry.shape_outliers;
  j["magnitude_outliers"] = geometry.magnitude_outliers;
  j["msv_boxplot"] = {{"q1", geometry.msv_boxplot.q1},
                      {"q3", geometry.msv_boxplot.q3},
                      {"iqr", geometry.msv_boxplot.iqr},
                      {"lower_fence", geometry.msv_boxplot.lower_fence}};
  return j;
}

inline void write_geometry(const BoxplotGeometry& geometry,
                           const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << geometry_to_json(geometry).dump(2) << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace tvdepth

#endif  // TVDEPTH_IO_HPP
