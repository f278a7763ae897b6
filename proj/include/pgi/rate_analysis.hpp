// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pgi/core_model.hpp"
#include "pgi/feedback.hpp"
#include "pgi/linalg.hpp"
#include "pgi/path_selection.hpp"
#include "pgi/random.hpp"

namespace pgi {

struct SignalTerms {
  double ds_ideal = 0;  // |sum tr(A_sel^H V)|^2 + sum ||A_sel^H V||_F^2
  double us = 0;        // sum ||A_unsel^H V||_F^2
  double is = 0;        // sum_{j != k} sum_m ||A(m,k)^H V(m,j)||_F^2
};

std::vector<SignalTerms> signal_terms(const PairGrid<CMatrix>& steering, const SelectionState& state);

// Block diagonal of A_sel(m,k)^H V(m,k) over BSs: square, side = user's path count.
CMatrix selected_gain_matrix(const PairGrid<CMatrix>& steering, const SelectionState& state, int k);

double rate_from_powers(double signal, double interference, double noise_var);

// Expected-rate formula with perfect gain feedback, per user.
std::vector<double> ideal_rate_closed_form(const PairGrid<CMatrix>& steering,
                                           const SelectionState& state, double noise_var);

// Received desired and interference powers per user for one channel draw.
void link_powers(const PairGrid<CVector>& channels, const PairGrid<CVector>& precoders,
                 std::vector<double>& signal, std::vector<double>& interference);

struct RateEstimate {
  double mean = 0;
  double se = 0;
};

// Mergeable moment sums for one user's link.
struct LinkAccumulator {
  double n = 0, sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0, slog = 0, slog2 = 0;
  void add(double signal, double interference, double noise_var);
  void merge(const LinkAccumulator& o);
  RateEstimate instantaneous() const;
  RateEstimate ratio_of_means(double noise_var) const;
};

enum class RateMode { instantaneous, ratio_of_means };

// Precoders w(m,k) for one channel draw.
using PrecoderBuilder = std::function<PairGrid<CVector>(const ChannelRealization& draw, Rng& rng)>;

std::vector<RateEstimate> mc_rate(const PairGrid<CMatrix>& steering, const PrecoderBuilder& builder,
                                  double noise_var, RateMode mode, int draws, std::uint64_t seed);

// w(m,k) = V(m,k) times the user's fed-back gains split per BS.
PairGrid<CVector> pgi_precoders(const SelectionState& state, const std::vector<CVector>& feedback);

// Maps a user's true stacked selected gains to the gains the DU reconstructs.
using PgiFeedback = std::function<CVector(const CVector& gains, Rng& rng)>;
PgiFeedback perfect_feedback();
PgiFeedback rvq_feedback(Codebook codebook);
// Fresh codebook of the given size for every call, drawn from the caller's stream.
PgiFeedback rvq_ensemble_feedback(int dim, int bits);

struct DistortionEstimate {
  double mean = 0;
  double se = 0;
};

// Normalized desired-power loss 1 - E|g^H X ghat|^2 / E|g^H X g|^2 over g ~ CN(0, I).
DistortionEstimate measure_distortion(const CMatrix& x, const PgiFeedback& feedback, int trials,
                                      std::uint64_t seed);

struct RateBreakdown {
  std::vector<double> ds, ds_ideal, us, is;
  std::vector<double> distortion, distortion_se;
  std::vector<double> rate_ideal, rate_realistic;
};

// Desired power scaled by the measured distortion; unselected and interference powers do not
// depend on the fed-back gains and come from the closed form.
RateBreakdown rate_breakdown(const PairGrid<CMatrix>& steering, const SelectionState& state,
                             double noise_var, const PgiFeedback& feedback, int draws,
                             std::uint64_t seed);

// E|u^H A u|^2 for u uniform on the unit sphere: (|tr A|^2 + ||A||_F^2) / (L (L + 1)).
double quadratic_moment_closed_form(const CMatrix& a);

// (|mu^H x|^2 + x^H G_own x) / (sum_{j != own} x^H G_j x + noise_var).
double slnr_value(const CVector& x, const CVector& mu, const std::vector<CMatrix>& gammas, int own,
                  double noise_var);
double slnr_value(const CVector& x, const SlnrOperands& ops);

}  // namespace pgi
