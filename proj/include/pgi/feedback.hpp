// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "pgi/linalg.hpp"

namespace pgi {

struct SelectionState;

struct Codebook {
  int dimension = 0;
  int bits = 0;
  std::uint64_t seed = 0;
  CMatrix words;  // dimension x 2^bits, unit columns
  Eigen::Index size() const { return words.cols(); }
};

// Words are drawn one after another from a single stream, so the codebook for B bits is the
// prefix of the codebook for any larger B with the same seed.
Codebook gen_rvq_codebook(int dim, int bits, std::uint64_t seed);

struct FeedbackMessage {
  int index = 0;  // 0-based codeword index
  double magnitude = 0.0;
};

// Codeword maximizing |gbar^H c|^2, first index on ties. Throws std::domain_error on a zero vector.
FeedbackMessage quantize_pgi(const CVector& g, const Codebook& codebook);
// |gbar^H c_index|^2 for the given index.
double codeword_gain(const CVector& g, const Codebook& codebook, int index);

CVector reconstruct_pgi(const FeedbackMessage& msg, const Codebook& codebook);

// Concatenate per-BS gain blocks of user k into the feedback vector (BS-major), and back.
CVector stack_user_blocks(const PairGrid<CVector>& blocks, int k);
std::vector<CVector> split_user_blocks(const CVector& stacked, const std::vector<int>& sizes);

// Quantizes the concatenated M*N channel of one user; returns the per-BS reconstruction.
std::vector<CVector> csi_baseline_feedback(const std::vector<CVector>& channels,
                                           const Codebook& full);

// Bits per BS that keep the CSI feedback rate gap constant: (N - 1)/3 * snr_db.
double csi_bits_rule(int num_antennas, double snr_db);

// Regularized zero-forcing across the cooperating group from estimated channels.
// Each user's stacked precoder is scaled to norm sqrt(M). Result indexed (bs, user).
PairGrid<CVector> rzf_precoders(const PairGrid<CVector>& channel_estimates, double regularization);

}  // namespace pgi
