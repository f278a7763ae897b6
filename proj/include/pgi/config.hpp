// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pgi {

enum class Scheme { proposed, rvq_csi, random_path, ideal_pgi };

const char* scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

struct SystemConfig {
  int num_bs = 5;
  int num_users = 5;
  int num_antennas = 8;
  int num_paths = 4;
  int path_budget = 8;
  int feedback_bits = 6;
  double snr_db = 15.0;
  double spacing_ratio = 0.5;
  double angular_spread = 10.0;  // degrees, full width
  double area_side = 1.0;        // km
  // Pilot noise: the data noise level when pilot_noise_equals_data_noise is set, else
  // pilot_noise_var when given, else 10^(-snr_db/10) so each unit-variance gain is observed at
  // the operating SNR.
  std::optional<double> pilot_noise_var;
  bool pilot_noise_equals_data_noise = false;
  std::uint64_t master_seed = 1;
  int trials = 200;

  bool use_estimated_aods = false;
  int music_snapshots = 64;
  double music_snr_db = 20.0;

  std::uint64_t codebook_seed_offset = 0;
  std::vector<Scheme> baselines{Scheme::rvq_csi, Scheme::random_path, Scheme::ideal_pgi};
  int gain_draws = 200;  // inner channel draws per trial
  int threads = 0;       // 0: hardware concurrency

  // Throws std::invalid_argument naming the offending field.
  void validate() const;

  bool baseline_enabled(Scheme s) const;
  double pilot_noise(double data_noise_var) const;
};

// YAML mapping with keys equal to the field names above. Unknown keys are rejected.
SystemConfig load_config(const std::string& path);
SystemConfig parse_config(const std::string& text);

// Canonical key: value text, one per line, fixed order.
std::string config_snapshot(const SystemConfig& c);

// Assign a numeric field by name (sweep axes use this).
void set_config_field(SystemConfig& c, const std::string& key, double value);

// Single-BS case of the path-budget study: one BS, P = 8, L = 4.
SystemConfig single_bs_preset();

}  // namespace pgi
