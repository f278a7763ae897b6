// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "pgi/errors.hpp"
#include "pgi/feedback.hpp"
#include "pgi/path_selection.hpp"
#include "pgi/theory_bounds.hpp"
#include "test_support.hpp"

using namespace pgi;

namespace {

// 1 - E[max of n Beta(1, L-1) draws] = integral over z of P(max <= z), by composite Simpson.
double complement_by_quadrature(int bits, int dim) {
  const double n = std::ldexp(1.0, bits);
  const int steps = 200000;
  auto f = [&](double z) { return std::pow(1.0 - std::pow(1.0 - z, dim - 1), n); };
  double s = f(0.0) + f(1.0);
  for (int i = 1; i < steps; ++i) s += (i % 2 ? 4.0 : 2.0) * f(static_cast<double>(i) / steps);
  return s / (3.0 * steps);
}

}  // namespace

TEST_CASE("beta function") {
  CHECK(beta_function(1, 3) == doctest::Approx(1.0 / 3));
  CHECK(beta_function(2, 3) == doctest::Approx(1.0 / 12));
  CHECK(std::isfinite(beta_function(4096, 8.0 / 7)));
  CHECK_THROWS(beta_function(0, 1));
}

TEST_CASE("rvq gamma with zero bits is 1/L") {
  for (int L = 2; L <= 16; ++L) CHECK(rvq_gamma(0, L).gamma == doctest::Approx(1.0 / L).epsilon(1e-12));
  CHECK_THROWS_AS(rvq_gamma(3, 1), std::domain_error);
}

TEST_CASE("rvq gamma matches the order-statistic integral") {
  for (int L : {2, 3, 8, 16})
    for (int B : {0, 1, 4, 6, 10}) CHECK(rvq_gamma(B, L).complement == doctest::Approx(complement_by_quadrature(B, L)).epsilon(1e-6));
}

TEST_CASE("rvq gamma grid: range, monotone in B, and below the exponential bound") {
  for (int L = 2; L <= 16; ++L) {
    double prev = 0.0;
    for (int B = 0; B <= 12; ++B) {
      const RvqGamma g = rvq_gamma(B, L);
      CHECK(g.gamma > 0.0);
      CHECK(g.gamma <= 1.0);
      CHECK(g.gamma > prev);
      prev = g.gamma;
      CHECK(g.complement <= g.bound + 1e-15);
      CHECK(g.bound == doctest::Approx(std::exp2(-static_cast<double>(B) / (L - 1))));
    }
  }
  CHECK(rvq_gamma(6, 8).bound == doctest::Approx(0.552).epsilon(1e-3));
}

TEST_CASE("rvq complement scales as a power of the codebook size for large B") {
  for (int L : {2, 8}) {
    const double b = static_cast<double>(L) / (L - 1);
    for (int B : {18, 20, 21, 40, 1000}) {
      const double ratio = rvq_gamma(B + 1, L).complement / rvq_gamma(B, L).complement;
      CHECK(ratio == doctest::Approx(std::exp2(1.0 - b)).epsilon(1e-6));
    }
  }
}

TEST_CASE("delta factor") {
  for (int L : {2, 4, 8}) {
    const DeltaFactor d = delta_factor(CMatrix::Identity(L, L));
    CHECK(d.value == doctest::Approx(1.0 / L));
    CHECK_FALSE(d.degenerate);
  }
  Rng rng(4);
  for (int t = 0; t < 300; ++t) {
    const int L = test::uniform_int(rng, 1, 10);
    const CMatrix x = complex_normal_matrix(rng, L, L) + cplx(test::uniform_real(rng, -2, 2), 0) * CMatrix::Identity(L, L);
    const DeltaFactor d = delta_factor(x);
    if (d.degenerate) continue;
    CHECK(d.value >= 1.0 / L - 1e-12);
    const cplx c(test::uniform_real(rng, -3, 3), test::uniform_real(rng, -3, 3));
    CHECK(delta_factor(c * x).value == doctest::Approx(d.value).epsilon(1e-10));
  }
  CMatrix traceless = CMatrix::Zero(2, 2);
  traceless(0, 0) = 1;
  traceless(1, 1) = -1;
  CHECK(delta_factor(traceless).degenerate);
}

TEST_CASE("delta factor from blocks agrees with the block-diagonal matrix") {
  Rng rng(7);
  std::vector<CMatrix> a, v;
  CMatrix x = CMatrix::Zero(6, 6);
  int off = 0;
  for (int sz : {1, 3, 2}) {
    a.push_back(complex_normal_matrix(rng, 8, sz));
    v.push_back(complex_normal_matrix(rng, 8, sz));
    x.block(off, off, sz, sz) = a.back().adjoint() * v.back();
    off += sz;
  }
  CHECK(delta_factor(a, v).value == doctest::Approx(delta_factor(x).value).epsilon(1e-12));
}

TEST_CASE("distortion bounds") {
  for (int L : {2, 4, 8, 16})
    for (int B : {0, 2, 6, 12}) {
      const DistortionBound b = distortion_bound(L, B, 1.0 / L);
      CHECK(b.weighted_bound == doctest::Approx(b.simple_bound).epsilon(1e-12));
      CHECK(b.simple_bound == doctest::Approx(std::exp2(-static_cast<double>(B) / (L - 1))));
      CHECK_FALSE(b.degenerate);
      for (int s = 0; s <= 20; ++s) {
        const double delta = 1.0 / L + (L - 1.0 / L) * s / 20.0;
        const DistortionBound d = distortion_bound(L, B, delta);
        CHECK(d.closed_form <= d.weighted_bound + 1e-15);
        CHECK(d.weighted_bound <= d.simple_bound + 1e-15);
        const double w = (L - delta) / ((L - 1) * (1 + delta));
        CHECK(d.closed_form == doctest::Approx(rvq_gamma(B, L).complement * w));
      }
    }
  const DistortionBound big = distortion_bound(8, 2000, 0.5);
  CHECK(big.closed_form < 1e-15);
  CHECK(big.weighted_bound < 1e-15);
  CHECK(big.simple_bound < 1e-15);
  const DistortionBound neg = distortion_bound(4, 2, 6.0);
  CHECK(neg.closed_form < 0);
  CHECK(neg.degenerate);
}

TEST_CASE("rate gap bound") {
  const double snr = std::pow(10.0, 1.5);
  const double delta = 0.3;
  const int L = 8, B = 6;
  const double q = std::exp2(-6.0 / 7);
  const double den = 7 * 1.3 - q * (8 - 0.3);
  CHECK(rate_gap_bound(L, B, delta, snr) == doctest::Approx(std::log2(1 + snr / (1 + snr) * 7.7 * q / den)).epsilon(1e-13));
  CHECK(rate_gap_bound(L, 400, delta, snr) < 1e-30);
  CHECK(rate_gap_bound(L, B, delta, 1e12) == doctest::Approx(std::log2(1 + 7.7 * q / den)).epsilon(1e-9));
  CHECK(rate_gap_bound(L, B, delta, 1.0) < rate_gap_bound(L, B, delta, 10.0));
  CHECK_THROWS_AS(rate_gap_bound(L, 0, 1.0 / L, snr), InfeasibleBound);
  CHECK_THROWS_AS(rate_gap_bound(1, 3, 1.0, snr), std::domain_error);
}

TEST_CASE("bit requirement inverts the rate gap bound") {
  Rng rng(21);
  for (int t = 0; t < 40; ++t) {
    const int L = test::uniform_int(rng, 2, 16);
    const double delta = test::uniform_real(rng, 1.0 / L, 0.95 * L);
    const double snr = std::pow(10.0, test::uniform_real(rng, -5, 30) / 10);
    const double beta = 1.0 + test::uniform_real(rng, 0.01, 2.0);
    const double bits = bits_for_rate_gap(L, delta, snr, beta);
    CHECK(std::abs(rate_gap_bound(L, bits, delta, snr) - std::log2(beta)) <= 1e-9);
  }
}

TEST_CASE("bit requirement grows as the target tightens and with L") {
  const double snr = 30.0;
  double prev = -1e300;
  for (double beta : {3.0, 2.0, 1.5, 1.1, 1.01, 1.001, 1.0001}) {
    const double b = bits_for_rate_gap(8, 1.0 / 8, snr, beta);
    CHECK(b > prev);
    prev = b;
  }
  prev = -1e300;
  for (int L = 2; L <= 16; ++L) {
    const double b = bits_for_rate_gap(L, 1.0 / L, snr, 1.2);
    CHECK(b > prev);
    prev = b;
  }
  CHECK_THROWS_AS(bits_for_rate_gap(8, 0.2, snr, 1.0), InfeasibleBound);
  CHECK_THROWS_AS(bits_for_rate_gap(8, 9.0, snr, 1.5), InfeasibleBound);
}

TEST_CASE("single-cell bound") {
  const double s2 = 0.5;
  CHECK(single_cell_rate_bound(4, 600, 0.25, s2, 2.0) == doctest::Approx(std::log2(1 + 5 / s2)));
  for (int L = 2; L < 16; ++L)
    CHECK(single_cell_rate_bound(L + 1, 600, 0.1, s2, 2.0) > single_cell_rate_bound(L, 600, 0.1, s2, 2.0));
  CHECK(single_cell_rate_bound(4, 6, 0.25, s2, 2.0) ==
        doctest::Approx(std::log2(1 + 5 / s2) - rate_gap_bound(4, 6, 0.25, 2.0)));
}

TEST_CASE("largest eigenvalue of the signal matrix is L + 1 for orthonormal steering") {
  Rng rng(8);
  for (int L : {2, 4, 8}) {
    const int N = 24, K = 3;
    // Orthonormal columns for all users at once, so other users are orthogonal to user 0.
    const CMatrix q = Eigen::HouseholderQR<CMatrix>(complex_normal_matrix(rng, N, N)).householderQ();
    PairGrid<CMatrix> steering(1, K);
    for (int k = 0; k < K; ++k) steering(0, k) = q.middleCols(k * L, L);
    PairGrid<IndexSet> sets(1, K);
    for (int k = 0; k < K; ++k)
      for (int i = 0; i < L; ++i) sets(0, k).push_back(i);
    const SlnrOperands ops = build_slnr_operands(steering, sets, 0.7, 0);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(ops.signal_matrix());
    CHECK(std::abs(es.eigenvalues().maxCoeff() - (L + 1)) <= 1e-8);
  }
}

TEST_CASE("residual direction is isotropic in the codeword null space") {
  Rng rng(31);
  const int L = 4;
  const CVector c = unit_sphere_vector(rng, L);
  const CMatrix proj = CMatrix::Identity(L, L) - c * c.adjoint();
  const int n = 40000;
  Eigen::MatrixXd s_re = Eigen::MatrixXd::Zero(L, L), s2_re = Eigen::MatrixXd::Zero(L, L);
  Eigen::MatrixXd s_im = Eigen::MatrixXd::Zero(L, L), s2_im = Eigen::MatrixXd::Zero(L, L);
  for (int t = 0; t < n; ++t) {
    CVector s = proj * complex_normal_vector(rng, L);
    s.normalize();
    const CMatrix o = s * s.adjoint();
    s_re += o.real();
    s2_re += o.real().cwiseAbs2();
    s_im += o.imag();
    s2_im += o.imag().cwiseAbs2();
  }
  const CMatrix expect = proj / static_cast<double>(L - 1);
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j) {
      const double mr = s_re(i, j) / n, mi = s_im(i, j) / n;
      const double ser = std::sqrt((s2_re(i, j) / n - mr * mr) / n), sei = std::sqrt((s2_im(i, j) / n - mi * mi) / n);
      CHECK(std::abs(mr - expect(i, j).real()) <= 3 * ser + 1e-12);
      CHECK(std::abs(mi - expect(i, j).imag()) <= 3 * sei + 1e-12);
    }
}

TEST_CASE("direction splits into codeword and orthogonal residual") {
  Rng rng(2);
  const Codebook cb = gen_rvq_codebook(6, 4, 99);
  for (int t = 0; t < 500; ++t) {
    const CVector g = unit_sphere_vector(rng, 6);
    const FeedbackMessage msg = quantize_pgi(g, cb);
    const CVector c = cb.words.col(msg.index);
    const cplx proj = c.dot(g);
    CHECK((g - proj * c).squaredNorm() == doctest::Approx(1.0 - std::norm(proj)).epsilon(1e-12));
  }
}
