// SPDX-License-Identifier: Apache-2.0
#include "pgi/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

namespace pgi {

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::proposed: return "proposed";
    case Scheme::rvq_csi: return "rvq_csi";
    case Scheme::random_path: return "random_path";
    case Scheme::ideal_pgi: return "ideal_pgi";
  }
  return "?";
}

Scheme scheme_from_name(const std::string& name) {
  for (Scheme s : {Scheme::proposed, Scheme::rvq_csi, Scheme::random_path, Scheme::ideal_pgi})
    if (name == scheme_name(s)) return s;
  throw std::invalid_argument("unknown scheme: " + name);
}

void SystemConfig::validate() const {
  auto req = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid config: ") + what);
  };
  req(num_bs >= 1, "num_bs >= 1");
  req(num_users >= 1, "num_users >= 1");
  req(num_antennas >= 1, "num_antennas >= 1");
  req(num_paths >= 1, "num_paths >= 1");
  req(path_budget >= 1, "path_budget >= 1");
  req(num_paths <= num_antennas, "num_paths <= num_antennas");
  req(path_budget <= num_bs * num_paths, "path_budget <= num_bs * num_paths");
  req(feedback_bits >= 0 && feedback_bits <= 24, "0 <= feedback_bits <= 24");
  req(std::isfinite(snr_db), "snr_db finite");
  req(spacing_ratio > 0.0, "spacing_ratio > 0");
  req(angular_spread >= 0.0, "angular_spread >= 0");
  req(area_side > 0.0, "area_side > 0");
  req(!pilot_noise_var || *pilot_noise_var >= 0.0, "pilot_noise_var >= 0");
  req(trials >= 1, "trials >= 1");
  req(music_snapshots >= 1, "music_snapshots >= 1");
  req(gain_draws >= 2, "gain_draws >= 2");
  req(threads >= 0, "threads >= 0");
  req(!use_estimated_aods || num_paths < num_antennas,
      "use_estimated_aods requires num_paths < num_antennas");
}

double SystemConfig::pilot_noise(double data_noise_var) const {
  if (pilot_noise_equals_data_noise) return data_noise_var;
  if (pilot_noise_var) return *pilot_noise_var;
  return std::pow(10.0, -snr_db / 10.0);
}

bool SystemConfig::baseline_enabled(Scheme s) const {
  return std::find(baselines.begin(), baselines.end(), s) != baselines.end();
}

namespace {

std::vector<Scheme> parse_baselines(const std::string& text) {
  std::vector<Scheme> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty() || item == "none") continue;
    Scheme s = scheme_from_name(item);
    if (s == Scheme::proposed) throw std::invalid_argument("proposed is not a baseline");
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  return out;
}

std::string baselines_text(const std::vector<Scheme>& b) {
  if (b.empty()) return "none";
  std::string s;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (i) s += ",";
    s += scheme_name(b[i]);
  }
  return s;
}

SystemConfig from_node(const YAML::Node& root) {
  SystemConfig c;
  if (!root || root.IsNull()) return c;
  if (!root.IsMap()) throw std::invalid_argument("config must be a mapping");
  for (const auto& kv : root) {
    const std::string key = kv.first.as<std::string>();
    const YAML::Node& v = kv.second;
    if (key == "num_bs") c.num_bs = v.as<int>();
    else if (key == "num_users") c.num_users = v.as<int>();
    else if (key == "num_antennas") c.num_antennas = v.as<int>();
    else if (key == "num_paths") c.num_paths = v.as<int>();
    else if (key == "path_budget") c.path_budget = v.as<int>();
    else if (key == "feedback_bits") c.feedback_bits = v.as<int>();
    else if (key == "snr_db") c.snr_db = v.as<double>();
    else if (key == "spacing_ratio" || key == "d_over_lambda") c.spacing_ratio = v.as<double>();
    else if (key == "angular_spread") c.angular_spread = v.as<double>();
    else if (key == "area_side") c.area_side = v.as<double>();
    else if (key == "pilot_noise_var") {
      if (v.IsNull() || v.as<std::string>() == "auto") c.pilot_noise_var.reset();
      else c.pilot_noise_var = v.as<double>();
    }
    else if (key == "pilot_noise_equals_data_noise") c.pilot_noise_equals_data_noise = v.as<bool>();
    else if (key == "master_seed") c.master_seed = v.as<std::uint64_t>();
    else if (key == "trials") c.trials = v.as<int>();
    else if (key == "use_estimated_aods") c.use_estimated_aods = v.as<bool>();
    else if (key == "music_snapshots") c.music_snapshots = v.as<int>();
    else if (key == "music_snr_db") c.music_snr_db = v.as<double>();
    else if (key == "codebook_seed_offset") c.codebook_seed_offset = v.as<std::uint64_t>();
    else if (key == "gain_draws") c.gain_draws = v.as<int>();
    else if (key == "threads") c.threads = v.as<int>();
    else if (key == "baseline") {
      if (v.IsSequence()) {
        std::string joined;
        for (const auto& e : v) joined += e.as<std::string>() + ",";
        c.baselines = parse_baselines(joined);
      } else {
        c.baselines = parse_baselines(v.as<std::string>());
      }
    } else {
      throw std::invalid_argument("unknown config key: " + key);
    }
  }
  c.validate();
  return c;
}

}  // namespace

SystemConfig parse_config(const std::string& text) {
  try {
    return from_node(YAML::Load(text));
  } catch (const YAML::Exception& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }
}

SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_snapshot(const SystemConfig& c) {
  std::string s;
  auto line = [&s](const char* k, const std::string& v) { s += fmt::format("{}: {}\n", k, v); };
  auto num = [](double x) { return fmt::format("{:.12g}", x); };
  line("num_bs", std::to_string(c.num_bs));
  line("num_users", std::to_string(c.num_users));
  line("num_antennas", std::to_string(c.num_antennas));
  line("num_paths", std::to_string(c.num_paths));
  line("path_budget", std::to_string(c.path_budget));
  line("feedback_bits", std::to_string(c.feedback_bits));
  line("snr_db", num(c.snr_db));
  line("spacing_ratio", num(c.spacing_ratio));
  line("angular_spread", num(c.angular_spread));
  line("area_side", num(c.area_side));
  line("pilot_noise_var", c.pilot_noise_var ? num(*c.pilot_noise_var) : std::string("auto"));
  line("pilot_noise_equals_data_noise", c.pilot_noise_equals_data_noise ? "true" : "false");
  line("master_seed", std::to_string(c.master_seed));
  line("trials", std::to_string(c.trials));
  line("use_estimated_aods", c.use_estimated_aods ? "true" : "false");
  line("music_snapshots", std::to_string(c.music_snapshots));
  line("music_snr_db", num(c.music_snr_db));
  line("codebook_seed_offset", std::to_string(c.codebook_seed_offset));
  line("baseline", baselines_text(c.baselines));
  line("gain_draws", std::to_string(c.gain_draws));
  return s;
}

void set_config_field(SystemConfig& c, const std::string& key, double value) {
  auto as_int = [&](int& field) {
    if (value != std::floor(value)) throw std::invalid_argument(key + " must be an integer");
    field = static_cast<int>(value);
  };
  if (key == "snr_db") c.snr_db = value;
  else if (key == "feedback_bits") as_int(c.feedback_bits);
  else if (key == "path_budget") as_int(c.path_budget);
  else if (key == "num_paths") as_int(c.num_paths);
  else if (key == "num_bs") as_int(c.num_bs);
  else if (key == "num_users") as_int(c.num_users);
  else if (key == "num_antennas") as_int(c.num_antennas);
  else if (key == "angular_spread") c.angular_spread = value;
  else if (key == "pilot_noise_var") c.pilot_noise_var = value;
  else throw std::invalid_argument("field not settable by value: " + key);
}

SystemConfig single_bs_preset() {
  SystemConfig c;
  c.num_bs = 1;
  c.num_paths = 8;
  c.path_budget = 4;
  return c;
}

}  // namespace pgi
