// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "pgi/config.hpp"
#include "pgi/sim_harness.hpp"

namespace pgi {

inline constexpr const char* kSweepSchema = "pgi-sweep/1";

// Comment header (schema, axis, quantity, master_seed, config snapshot) followed by CSV rows
// axis_value,scheme,mean_sum_rate,ci95,trials,failed_trials. Reals use 12 significant digits.
std::string format_sweep(const SweepResult& result);
SweepResult parse_sweep(const std::string& text);  // throws SchemaError

void save_sweep(const SweepResult& result, const std::string& path);
SweepResult load_sweep(const std::string& path);

// SHA-1 of "blob <size>\0" + content, hex encoded.
std::string git_blob_digest(const std::string& content);

struct RunManifest {
  std::string command;
  std::string axis;
  std::vector<double> values;
  int trials = 0;
  SystemConfig config;
  std::vector<std::string> outputs;  // file paths, digested when written
};

// YAML text with config snapshot, seed, input digest and output digests.
std::string format_manifest(const RunManifest& manifest);
void write_manifest(const RunManifest& manifest, const std::string& path);

}  // namespace pgi
