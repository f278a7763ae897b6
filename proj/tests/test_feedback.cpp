// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <vector>

#include "pgi/feedback.hpp"
#include "pgi/theory_bounds.hpp"
#include "test_support.hpp"

using namespace pgi;

TEST_CASE("codebook shape, norms and determinism") {
  const Codebook zero = gen_rvq_codebook(4, 0, 1);
  CHECK(zero.size() == 1);
  const Codebook c = gen_rvq_codebook(5, 6, 42);
  CHECK(c.size() == 64);
  CHECK(c.dimension == 5);
  for (Eigen::Index i = 0; i < c.size(); ++i) CHECK(std::abs(c.words.col(i).norm() - 1.0) <= 1e-12);
  CHECK(c.words == gen_rvq_codebook(5, 6, 42).words);
  CHECK(c.words != gen_rvq_codebook(5, 6, 43).words);
  // Prefix nesting.
  CHECK(gen_rvq_codebook(5, 8, 42).words.leftCols(64) == c.words);
  CHECK_THROWS(gen_rvq_codebook(0, 2, 1));
  CHECK_THROWS(gen_rvq_codebook(3, -1, 1));
}

TEST_CASE("codewords are isotropic") {
  Rng rng(1);
  const CVector g = unit_sphere_vector(rng, 8);
  // 2^16 words: the 2% band is about six standard errors (4096 words would give only 1.5).
  const Codebook c = gen_rvq_codebook(8, 16, 5);
  const double mean = (c.words.adjoint() * g).cwiseAbs2().mean();
  CHECK(std::abs(mean - 1.0 / 8) <= 0.02 / 8);
}

TEST_CASE("quantizer picks the best codeword and is scale and phase invariant") {
  Rng rng(2);
  const Codebook c = gen_rvq_codebook(6, 7, 3);
  for (int t = 0; t < 300; ++t) {
    const CVector g = complex_normal_vector(rng, 6);
    const FeedbackMessage msg = quantize_pgi(g, c);
    CHECK(msg.magnitude == doctest::Approx(g.norm()));
    const double best = codeword_gain(g, c, msg.index);
    for (Eigen::Index i = 0; i < c.size(); ++i) CHECK(best >= codeword_gain(g, c, static_cast<int>(i)));
    const cplx alpha = std::polar(test::uniform_real(rng, 0.1, 10), test::uniform_real(rng, -3.2, 3.2));
    CHECK(quantize_pgi(alpha * g, c).index == msg.index);
  }
}

TEST_CASE("a codeword quantizes to itself and reconstructs up to phase") {
  const Codebook c = gen_rvq_codebook(4, 5, 9);
  const CVector g = std::polar(2.5, 0.7) * c.words.col(17);
  const FeedbackMessage msg = quantize_pgi(g, c);
  CHECK(msg.index == 17);
  CHECK(codeword_gain(g, c, 17) == doctest::Approx(1.0));
  const CVector r = reconstruct_pgi(msg, c);
  CHECK(std::abs(std::abs(r.dot(g)) - g.squaredNorm()) <= 1e-12);
}

TEST_CASE("ties go to the first index") {
  Codebook c;
  c.dimension = 2;
  c.bits = 1;
  c.words = CMatrix(2, 2);
  c.words << cplx(1, 0), cplx(0, 1), cplx(0, 0), cplx(0, 0);
  CVector g(2);
  g << cplx(3, 0), cplx(1, 0);
  CHECK(quantize_pgi(g, c).index == 0);
}

TEST_CASE("reconstruction norm and errors") {
  Rng rng(3);
  const Codebook c = gen_rvq_codebook(5, 4, 1);
  for (int t = 0; t < 50; ++t) {
    const CVector g = complex_normal_vector(rng, 5);
    CHECK(reconstruct_pgi(quantize_pgi(g, c), c).norm() == doctest::Approx(g.norm()).epsilon(1e-12));
  }
  CHECK(reconstruct_pgi({3, 0.0}, c).norm() == 0.0);
  CHECK_THROWS_AS(reconstruct_pgi({16, 1.0}, c), std::out_of_range);
  CHECK_THROWS_AS(reconstruct_pgi({-1, 1.0}, c), std::out_of_range);
  CHECK_THROWS_AS(quantize_pgi(CVector::Zero(5), c), std::domain_error);
  CHECK_THROWS(quantize_pgi(CVector::Ones(4), c));
}

TEST_CASE("mean codeword gain matches the RVQ expectation") {
  Rng rng(4);
  const int L = 8, B = 6, n = 20000;
  test::Moments mom;
  for (int t = 0; t < n; ++t) {
    const Codebook c = gen_rvq_codebook(L, B, rng());
    const CVector g = complex_normal_vector(rng, L);
    mom.add(codeword_gain(g, c, quantize_pgi(g, c).index));
  }
  const double gamma = rvq_gamma(B, L).gamma;
  MESSAGE("measured " << mom.mean() << " expected " << gamma);
  CHECK(std::abs(mom.mean() - gamma) <= 0.01 * gamma);
}

TEST_CASE("direction loss does not grow with more bits on nested codebooks") {
  Rng rng(5);
  const int L = 6;
  std::vector<CVector> dirs;
  for (int t = 0; t < 3000; ++t) dirs.push_back(complex_normal_vector(rng, L));
  const Codebook master = gen_rvq_codebook(L, 6, 77);
  double prev = 2.0;
  for (int B : {0, 2, 4, 6}) {
    Codebook c = master;
    c.bits = B;
    c.words = master.words.leftCols(Eigen::Index{1} << B);
    double loss = 0;
    for (const auto& g : dirs) loss += 1.0 - codeword_gain(g, c, quantize_pgi(g, c).index);
    loss /= static_cast<double>(dirs.size());
    CHECK(loss <= prev);
    prev = loss;
  }
}

TEST_CASE("user block stacking follows BS order") {
  PairGrid<CVector> blocks(3, 2);
  blocks(0, 1) = CVector::Constant(1, cplx(1, 0));
  blocks(1, 1) = CVector::Constant(2, cplx(2, 0));
  blocks(2, 1) = CVector::Constant(1, cplx(3, 0));
  for (int m = 0; m < 3; ++m) blocks(m, 0) = CVector::Zero(1);
  const CVector s = stack_user_blocks(blocks, 1);
  REQUIRE(s.size() == 4);
  CHECK(s(0) == cplx(1, 0));
  CHECK(s(2) == cplx(2, 0));
  CHECK(s(3) == cplx(3, 0));
  const auto parts = split_user_blocks(s, {1, 2, 1});
  CHECK(parts[1] == blocks(1, 1));
  CHECK_THROWS(split_user_blocks(s, {1, 2}));
  CHECK_THROWS(split_user_blocks(s, {3, 2}));
}

TEST_CASE("csi bit rule") {
  CHECK(csi_bits_rule(16, 10) == doctest::Approx(50.0));
  CHECK(6 * csi_bits_rule(16, 10) == doctest::Approx(300.0));
}

TEST_CASE("csi baseline feedback") {
  const Codebook full = gen_rvq_codebook(8, 6, 11);
  const CVector word = 1.7 * full.words.col(5);
  const auto rec = csi_baseline_feedback({word.head(4), word.tail(4)}, full);
  REQUIRE(rec.size() == 2);
  CVector joined(8);
  joined << rec[0], rec[1];
  CHECK((joined - word).norm() <= 1e-12);
  CHECK_THROWS(csi_baseline_feedback({word.head(4)}, full));
  CHECK_THROWS(csi_baseline_feedback({CVector::Zero(4), CVector::Zero(4)}, full));

  Rng rng(6);
  test::Moments mom;
  for (int t = 0; t < 4000; ++t) {
    const Codebook c = gen_rvq_codebook(8, 6, rng());
    const CVector h0 = complex_normal_vector(rng, 4), h1 = complex_normal_vector(rng, 4);
    const auto r = csi_baseline_feedback({h0, h1}, c);
    CVector h(8), hr(8);
    h << h0, h1;
    hr << r[0], r[1];
    mom.add(1.0 - std::norm(hr.dot(h)) / (h.squaredNorm() * hr.squaredNorm()));
  }
  CHECK(mom.mean() <= std::exp2(-6.0 / 7) + 3 * mom.se());
}

TEST_CASE("rzf precoders have the requested norm and null interference at high SNR") {
  Rng rng(7);
  const int M = 2, K = 3, N = 4;
  PairGrid<CVector> h(M, K);
  for (auto& x : h) x = complex_normal_vector(rng, N);
  const PairGrid<CVector> w = rzf_precoders(h, 1e-9);
  for (int k = 0; k < K; ++k) {
    CHECK(stack_user_blocks(w, k).norm() == doctest::Approx(std::sqrt(2.0)));
    for (int j = 0; j < K; ++j) {
      if (j == k) continue;
      const cplx leak = stack_user_blocks(h, j).dot(stack_user_blocks(w, k));
      CHECK(std::abs(leak) <= 1e-6);
    }
  }
}
