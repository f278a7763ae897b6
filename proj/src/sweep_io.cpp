// SPDX-License-Identifier: Apache-2.0
#include "pgi/sweep_io.hpp"

#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <openssl/sha.h>
#include <yaml-cpp/yaml.h>

#include "pgi/errors.hpp"

namespace pgi {

namespace {

const std::array<const char*, 6> kColumns{"axis_value", "scheme", "mean_sum_rate", "ci95", "trials", "failed_trials"};

std::string num(double x) { return fmt::format("{:.12g}", x); }

std::string trim(std::string s) {
  s.erase(0, s.find_first_not_of(" \t\r"));
  s.erase(s.find_last_not_of(" \t\r") + 1);
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw SchemaError(fmt::format("line {}: not a number: '{}'", line, s));
  }
}

int parse_int(const std::string& s, int line) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw SchemaError(fmt::format("line {}: not an integer: '{}'", line, s));
  return v;
}

}  // namespace

std::string format_sweep(const SweepResult& r) {
  std::string out;
  out += fmt::format("# schema: {}\n", kSweepSchema);
  out += fmt::format("# axis: {}\n", r.axis_name);
  out += fmt::format("# quantity: {}\n", r.quantity);
  out += fmt::format("# master_seed: {}\n", r.master_seed);
  std::stringstream snap(r.config_snapshot);
  std::string line;
  while (std::getline(snap, line))
    if (!line.empty()) out += "# config." + line + "\n";
  for (std::size_t i = 0; i < kColumns.size(); ++i) out += (i ? "," : "") + std::string(kColumns[i]);
  out += "\n";
  for (std::size_t v = 0; v < r.axis_values.size(); ++v) {
    for (const auto& s : r.series) {
      if (s.points.size() != r.axis_values.size())
        throw std::invalid_argument("format_sweep: series length differs from axis length");
      const SeriesPoint& p = s.points[v];
      out += fmt::format("{},{},{},{},{},{}\n", num(r.axis_values[v]), s.scheme, num(p.mean), num(p.ci95), p.trials, p.failed);
    }
  }
  return out;
}

SweepResult parse_sweep(const std::string& text) {
  SweepResult r;
  std::map<std::string, std::string> header;
  std::stringstream in(text);
  std::string line;
  int lineno = 0;
  std::vector<int> col;  // position of each required column
  bool have_columns = false;
  std::map<std::string, std::size_t> scheme_pos;
  std::map<std::string, std::size_t> value_pos;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = trim(line.substr(1));
      const auto colon = body.find(':');
      if (colon == std::string::npos) continue;
      const std::string key = trim(body.substr(0, colon));
      const std::string val = trim(body.substr(colon + 1));
      if (key.rfind("config.", 0) == 0) r.config_snapshot += key.substr(7) + ": " + val + "\n";
      else header[key] = val;
      continue;
    }
    const auto cells = split_csv(line);
    if (!have_columns) {
      col.assign(kColumns.size(), -1);
      for (std::size_t i = 0; i < kColumns.size(); ++i)
        for (std::size_t c = 0; c < cells.size(); ++c)
          if (cells[c] == kColumns[i]) col[i] = static_cast<int>(c);
      for (std::size_t i = 0; i < kColumns.size(); ++i)
        if (col[i] < 0) throw SchemaError(fmt::format("missing column '{}'", kColumns[i]));
      have_columns = true;
      continue;
    }
    int need = 0;
    for (int c : col) need = std::max(need, c + 1);
    if (static_cast<int>(cells.size()) < need)
      throw SchemaError(fmt::format("line {}: expected {} cells, found {}", lineno, need, cells.size()));
    const double v = parse_double(cells[col[0]], lineno);
    const std::string& scheme = cells[col[1]];
    const std::string vkey = num(v);
    if (!value_pos.count(vkey)) {
      value_pos[vkey] = r.axis_values.size();
      r.axis_values.push_back(v);
      for (auto& s : r.series) s.points.emplace_back();
    }
    if (!scheme_pos.count(scheme)) {
      scheme_pos[scheme] = r.series.size();
      r.series.push_back({scheme, std::vector<SeriesPoint>(r.axis_values.size())});
    }
    SeriesPoint& p = r.series[scheme_pos[scheme]].points[value_pos[vkey]];
    p.mean = parse_double(cells[col[2]], lineno);
    p.ci95 = parse_double(cells[col[3]], lineno);
    p.trials = parse_int(cells[col[4]], lineno);
    p.failed = parse_int(cells[col[5]], lineno);
  }
  if (!header.count("schema")) throw SchemaError("missing schema header");
  if (header["schema"] != kSweepSchema)
    throw SchemaError("unsupported schema version: " + header["schema"]);
  if (!have_columns) throw SchemaError("missing column header row");
  if (!header.count("axis")) throw SchemaError("missing axis header");
  if (!header.count("master_seed")) throw SchemaError("missing master_seed header");
  r.axis_name = header["axis"];
  if (header.count("quantity")) r.quantity = header["quantity"];
  try {
    r.master_seed = std::stoull(header["master_seed"]);
  } catch (const std::exception&) {
    throw SchemaError("bad master_seed header");
  }
  return r;
}

void save_sweep(const SweepResult& result, const std::string& path) {
  const std::string text = format_sweep(result);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

SweepResult load_sweep(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_sweep(ss.str());
}

std::string git_blob_digest(const std::string& content) {
  std::string blob = "blob " + std::to_string(content.size());
  blob.push_back('\0');
  blob += content;
  unsigned char md[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), md);
  std::string hex;
  for (unsigned char c : md) hex += fmt::format("{:02x}", c);
  return hex;
}

std::string format_manifest(const RunManifest& m) {
  std::string values;
  for (std::size_t i = 0; i < m.values.size(); ++i) values += (i ? "," : "") + num(m.values[i]);
  const std::string snapshot = config_snapshot(m.config);
  const std::string inputs = snapshot + "axis: " + m.axis + "\nvalues: " + values +
                             "\ntrials: " + std::to_string(m.trials) + "\n";
  YAML::Emitter e;
  e << YAML::BeginMap;
  e << YAML::Key << "schema" << YAML::Value << "pgi-manifest/1";
  e << YAML::Key << "command" << YAML::Value << m.command;
  e << YAML::Key << "axis" << YAML::Value << m.axis;
  e << YAML::Key << "values" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (double v : m.values) e << num(v);
  e << YAML::EndSeq;
  e << YAML::Key << "trials" << YAML::Value << m.trials;
  e << YAML::Key << "master_seed" << YAML::Value << std::to_string(m.config.master_seed);
  e << YAML::Key << "input_digest" << YAML::Value << git_blob_digest(inputs);
  e << YAML::Key << "config" << YAML::Value << YAML::Literal << snapshot;
  e << YAML::Key << "outputs" << YAML::Value << YAML::BeginSeq;
  for (const auto& path : m.outputs) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    if (in) ss << in.rdbuf();
    e << YAML::BeginMap << YAML::Key << "path" << YAML::Value << path << YAML::Key << "digest"
      << YAML::Value << (in ? git_blob_digest(ss.str()) : std::string("missing")) << YAML::EndMap;
  }
  e << YAML::EndSeq;
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << format_manifest(manifest);
}

}  // namespace pgi
