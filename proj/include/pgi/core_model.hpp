// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "pgi/config.hpp"
#include "pgi/linalg.hpp"
#include "pgi/random.hpp"

namespace pgi {

struct SelectionState;

struct Geometry {
  std::vector<Eigen::Vector2d> bs_positions;    // km
  std::vector<Eigen::Vector2d> user_positions;  // km
  PairGrid<double> nominal_aods;                // radians, broadside-referenced
  PairGrid<RVector> path_aods;                  // P angles per (bs, user)
  int num_bs() const { return static_cast<int>(bs_positions.size()); }
  int num_users() const { return static_cast<int>(user_positions.size()); }
};

struct ChannelRealization {
  PairGrid<CMatrix> steering;  // N x P
  PairGrid<CVector> gains;     // P
  PairGrid<CVector> channels;  // N, steering * gains
};

// Entry j is exp(-i j 2 pi spacing sin(theta)).
CVector steering_vector(double theta, int n, double spacing_ratio);
CMatrix steering_matrix(const RVector& thetas, int n, double spacing_ratio);

// Bearing from -> to folded into (-pi/2, pi/2] (array axis along y, broadside along x).
double broadside_angle(const Eigen::Vector2d& from, const Eigen::Vector2d& to);

Geometry draw_scenario(const SystemConfig& config, std::uint64_t seed);

PairGrid<CMatrix> steering_from_angles(const PairGrid<RVector>& aods, int n, double spacing_ratio);

// Gains CN(0, 1) per path, drawn bs-major then user then path.
PairGrid<CVector> draw_gains(const PairGrid<CMatrix>& steering, Rng& rng);

// h = A g for every pair.
ChannelRealization assemble_channel(PairGrid<CMatrix> steering, PairGrid<CVector> gains);

ChannelRealization realize_channel(const Geometry& geometry, const SystemConfig& config,
                                   std::uint64_t seed);

// Mean over users of the closed-form DS + US + IS, divided by the linear SNR.
double noise_variance_for_snr(const PairGrid<CMatrix>& steering, const SelectionState& selection,
                              double snr_db);
double noise_variance_for_snr(const ChannelRealization& realization,
                              const SelectionState& selection, double snr_db);

// Fixed point of noise_variance_for_snr on the all-path SLNR precoders, which depend on the
// noise level themselves. Starts from 1.
double calibrate_noise_variance(const PairGrid<CMatrix>& steering, double snr_db,
                                int iterations = 4);

// Same fixed point, but on the dominating-path selection with `budget` paths per user, so the
// SNR refers to the power the selected paths actually deliver. Seeded by the all-path value.
double calibrate_noise_variance_selected(const PairGrid<CMatrix>& steering, int budget,
                                         double snr_db, int iterations = 4);

}  // namespace pgi
