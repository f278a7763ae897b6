// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pgi/config.hpp"

namespace pgi {

struct TrialResult {
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  double noise_var = 0.0;
  std::vector<Scheme> schemes;                 // proposed first, then enabled baselines
  std::vector<std::vector<double>> user_rates;  // [scheme][user], bits/s/Hz
  std::uint64_t realization_digest = 0;         // steering and noise level
  std::vector<std::uint64_t> draw_digest;       // [scheme], 0 for closed-form schemes
  int music_shortfalls = 0;
  int regularized_pilots = 0;

  bool has(Scheme s) const;
  const std::vector<double>& rates(Scheme s) const;
  double sum_rate(Scheme s) const;
};

// One realization: geometry, optional AoD estimation, path selection, precoded training, RVQ
// feedback, and every enabled baseline on the same channel and noise draws. Module errors are
// caught and reported through `failed`.
TrialResult run_trial(const SystemConfig& config, std::uint64_t trial_seed);

// Runs `count` trials with seeds derive_seed(master, {group, i}); results ordered by i.
std::vector<TrialResult> run_trials(const SystemConfig& config, std::uint64_t group, int count);

struct SeriesPoint {
  double mean = 0.0;
  double ci95 = 0.0;
  int trials = 0;
  int failed = 0;
};

struct SweepSeries {
  std::string scheme;
  std::vector<SeriesPoint> points;  // one per axis value
};

struct SweepResult {
  std::string axis_name;
  std::string quantity = "sum_rate";
  std::vector<double> axis_values;
  std::vector<SweepSeries> series;
  std::string config_snapshot;
  std::uint64_t master_seed = 0;
  std::vector<std::vector<TrialResult>> trials;  // [value][trial]; not persisted

  const SweepSeries& find(const std::string& scheme) const;
};

inline const std::vector<std::string>& sweep_axes() {
  static const std::vector<std::string> axes{"snr_db", "feedback_bits", "path_budget", "num_paths", "num_bs"};
  return axes;
}

// Config for one axis value; num_paths also sets the path budget to twice the path count.
SystemConfig config_for_axis(const SystemConfig& base, const std::string& axis, double value);

// Mean and normal-approximation 95% half width of one scheme's sum rate over successful trials,
// summed in trial-index order.
SeriesPoint aggregate(const std::vector<TrialResult>& trials, Scheme scheme);

SweepResult run_sweep(const SystemConfig& config, const std::string& axis,
                      const std::vector<double>& values, int trials);

}  // namespace pgi
