// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "pgi/linalg.hpp"
#include "pgi/random.hpp"

namespace pgi {

struct CovarianceEstimate {
  CMatrix matrix;
  int snapshot_count = 0;
};

CovarianceEstimate sample_covariance(const std::vector<CVector>& snapshots);

struct MusicSpectrum {
  std::vector<double> grid;    // radians, strictly increasing
  std::vector<double> values;  // 1 / (a^H En En^H a), denominator floored
  int signal_dim = 0;
  double spacing_ratio = 0.5;
};

// Uniform grid over (-90, 90) degrees with the given step in degrees.
std::vector<double> angle_grid(double step_deg = 0.1);

MusicSpectrum music_spectrum(const CovarianceEstimate& cov, int signal_dim,
                             const std::vector<double>& grid, double spacing_ratio = 0.5);

struct AodEstimate {
  std::vector<double> angles;  // ascending, radians
  bool shortfall = false;      // fewer local maxima than requested
};

// The largest local maxima, each refined by one parabolic step, returned ascending.
AodEstimate estimate_aods(const MusicSpectrum& spectrum, int count);

// Uplink snapshots A g_t + noise with fresh gains per snapshot. noise_var applies per antenna.
std::vector<CVector> uplink_snapshots(const CMatrix& steering, int count, double noise_var, Rng& rng);

}  // namespace pgi
