// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "pgi/linalg.hpp"

namespace pgi {

// Beta(a, b) through log-gamma.
double beta_function(double a, double b);

struct RvqGamma {
  double gamma;       // E|gbar^H c|^2 for the best of 2^B random codewords
  double complement;  // 1 - gamma = 2^B Beta(2^B, L/(L-1))
  double bound;       // 2^(-B/(L-1))
};

RvqGamma rvq_gamma(int bits, int dim);

struct DeltaFactor {
  double value;
  bool degenerate;  // |trace| negligible against the Frobenius norm
};

// Ratio ||X||_F^2 / |tr X|^2 for the square selected-gain matrix X.
DeltaFactor delta_factor(const CMatrix& x);
// Same quantity from per-BS blocks (selected steering columns, precoder).
DeltaFactor delta_factor(const std::vector<CMatrix>& selected_steering,
                         const std::vector<CMatrix>& precoders);

struct DistortionBound {
  double closed_form;
  double weighted_bound;
  double simple_bound;
  bool degenerate;  // delta outside [1/L, L]; values returned as computed
};

DistortionBound distortion_bound(int dim, int bits, double delta);

// Per-user rate gap bound between perfect and B-bit feedback. Throws InfeasibleBound when the
// denominator is not positive.
double rate_gap_bound(int dim, double bits, double delta, double snr);

// Bits for which rate_gap_bound equals log2(beta). Real-valued; may be negative when B = 0
// already meets the target.
double bits_for_rate_gap(int dim, double delta, double snr, double beta);

// log2(1 + (L + 1)/sigma^2) minus the rate gap bound.
double single_cell_rate_bound(int dim, double bits, double delta, double noise_var, double snr);

}  // namespace pgi
