// SPDX-License-Identifier: Apache-2.0
#include "pgi/theory_bounds.hpp"

#include <cmath>
#include <numbers>
#include <limits>
#include <stdexcept>
#include <string>

#include "pgi/errors.hpp"

namespace pgi {

namespace {
void require_dim(int dim, const char* who) {
  if (dim < 2) throw std::domain_error(std::string(who) + ": dimension must be >= 2");
}
void require_bits(int bits, const char* who) {
  if (bits < 0) throw std::domain_error(std::string(who) + ": bits must be >= 0");
}
double residual_weight(int dim, double delta) {
  return (dim - delta) / ((dim - 1) * (1.0 + delta));
}
}  // namespace

double beta_function(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("beta_function: arguments must be > 0");
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

RvqGamma rvq_gamma(int bits, int dim) {
  require_dim(dim, "rvq_gamma");
  require_bits(bits, "rvq_gamma");
  const double b = static_cast<double>(dim) / (dim - 1);
  double log_ratio;  // log(Gamma(n + 1) / Gamma(n + b)), n = 2^B
  if (bits <= 20) {
    const double n = std::ldexp(1.0, bits);
    log_ratio = std::lgamma(n + 1.0) - std::lgamma(n + b);
  } else {
    // lgamma cancels badly for large n; two-term expansion, error O(n^-2).
    const double logn = bits * std::numbers::ln2;
    log_ratio = (1.0 - b) * logn + (1.0 - b) * b * 0.5 * std::exp(-logn);
  }
  // 2^B Beta(2^B, b) = Gamma(b) Gamma(n + 1) / Gamma(n + b)
  const double complement = std::exp(std::lgamma(b) + log_ratio);
  return {1.0 - complement, complement, std::exp2(-static_cast<double>(bits) / (dim - 1))};
}

DeltaFactor delta_factor(const CMatrix& x) {
  if (x.rows() != x.cols()) throw std::invalid_argument("delta_factor: matrix must be square");
  const double fro2 = x.squaredNorm();
  const double tr = std::abs(x.trace());
  DeltaFactor d{};
  d.degenerate = !(tr >= 1e-12 * std::sqrt(fro2)) || fro2 == 0.0;
  d.value = tr > 0.0 ? fro2 / (tr * tr) : std::numeric_limits<double>::infinity();
  return d;
}

DeltaFactor delta_factor(const std::vector<CMatrix>& selected_steering,
                         const std::vector<CMatrix>& precoders) {
  if (selected_steering.size() != precoders.size())
    throw std::invalid_argument("delta_factor: block count mismatch");
  double fro2 = 0.0;
  cplx tr = 0.0;
  for (std::size_t m = 0; m < precoders.size(); ++m) {
    if (selected_steering[m].cols() != precoders[m].cols() || selected_steering[m].rows() != precoders[m].rows())
      throw std::invalid_argument("delta_factor: block shape mismatch");
    if (precoders[m].size() == 0) continue;
    const CMatrix p = selected_steering[m].adjoint() * precoders[m];
    fro2 += p.squaredNorm();
    tr += p.trace();
  }
  const double t = std::abs(tr);
  DeltaFactor d{};
  d.degenerate = !(t >= 1e-12 * std::sqrt(fro2)) || fro2 == 0.0;
  d.value = t > 0.0 ? fro2 / (t * t) : std::numeric_limits<double>::infinity();
  return d;
}

DistortionBound distortion_bound(int dim, int bits, double delta) {
  const RvqGamma g = rvq_gamma(bits, dim);
  const double w = residual_weight(dim, delta);
  DistortionBound b{};
  b.closed_form = g.complement * w;
  b.weighted_bound = g.bound * w;
  b.simple_bound = g.bound;
  b.degenerate = delta < 1.0 / dim || delta > dim;
  return b;
}

double rate_gap_bound(int dim, double bits, double delta, double snr) {
  require_dim(dim, "rate_gap_bound");
  if (!(snr > 0.0)) throw std::domain_error("rate_gap_bound: snr must be > 0");
  const double q = std::exp2(-bits / (dim - 1));
  const double den = (dim - 1) * (1.0 + delta) - q * (dim - delta);
  if (!(den > 0.0)) throw InfeasibleBound("rate_gap_bound: nonpositive denominator");
  return std::log2(1.0 + (snr / (1.0 + snr)) * (dim - delta) * q / den);
}

double bits_for_rate_gap(int dim, double delta, double snr, double beta) {
  require_dim(dim, "bits_for_rate_gap");
  if (!(snr > 0.0)) throw InfeasibleBound("bits_for_rate_gap: snr must be > 0");
  if (!(beta > 1.0)) throw InfeasibleBound("bits_for_rate_gap: target factor must exceed 1");
  const double r = residual_weight(dim, delta);
  if (!(r > 0.0)) throw InfeasibleBound("bits_for_rate_gap: delta must be below L");
  const double s = snr / (1.0 + snr);
  return (dim - 1) * (std::log2(r) + std::log2(1.0 + s / (beta - 1.0)));
}

double single_cell_rate_bound(int dim, double bits, double delta, double noise_var, double snr) {
  require_dim(dim, "single_cell_rate_bound");
  if (!(noise_var > 0.0)) throw std::domain_error("single_cell_rate_bound: noise variance must be > 0");
  return std::log2(1.0 + (dim + 1.0) / noise_var) - rate_gap_bound(dim, bits, delta, snr);
}

}  // namespace pgi
