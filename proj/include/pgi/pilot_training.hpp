// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "pgi/linalg.hpp"
#include "pgi/path_selection.hpp"
#include "pgi/random.hpp"

namespace pgi {

struct PilotPrecoder {
  CMatrix matrix;             // |set| x N, selection times pseudo-inverse
  Eigen::MatrixXd selection;  // |set| x P, one 1 per row
  bool regularized = false;
  double condition = 1.0;  // condition number of A^H A
};

// Above this condition number of A^H A the steering matrix is treated as rank deficient and a
// Tikhonov-regularized solve is used.
inline constexpr double kPilotConditionGuard = 1e24;

PilotPrecoder build_pilot_precoder(const CMatrix& steering, const IndexSet& set);

struct PilotSequences {
  PairGrid<CMatrix> blocks;  // |set(m,k)| x length, rows of one unitary matrix
  int length = 0;
};

// Row blocks in user-major order (k, then m) of a seeded random unitary.
PilotSequences gen_pilot_sequences(const PairGrid<int>& sizes, std::uint64_t seed);

struct PilotPlan {
  PairGrid<PilotPrecoder> precoders;
  PilotSequences sequences;
  int regularized_count = 0;
};

PilotPlan make_pilot_plan(const PairGrid<CMatrix>& steering, const PairGrid<IndexSet>& sets,
                          std::uint64_t seed);

struct TrainingObservation {
  CVector received;  // one sample per pilot slot
  double noise_var = 0.0;
};

// Received pilot samples of every user: sum over (m, j) of (W(m,j) h(m,k))^H psi(m,j)(t) plus noise.
std::vector<TrainingObservation> simulate_training(const PairGrid<CVector>& channels,
                                                   const PilotPlan& plan, double noise_var, Rng& rng);
std::vector<TrainingObservation> simulate_training(const PairGrid<CVector>& channels,
                                                   const PilotPlan& plan, double noise_var,
                                                   std::uint64_t seed);
// Same model with caller-supplied noise samples (one vector of pilot length per user).
std::vector<TrainingObservation> simulate_training(const PairGrid<CVector>& channels,
                                                   const PilotPlan& plan, double noise_var,
                                                   const std::vector<CVector>& noise);

// Psi times the conjugated sample vector.
CVector despread(const TrainingObservation& obs, const CMatrix& sequence);

// Scalar LMMSE shrinkage of the despread samples: Psi y / (1 + noise_var).
CVector lmmse_pgi(const TrainingObservation& obs, const CMatrix& sequence, double noise_var);

}  // namespace pgi
