// SPDX-License-Identifier: Apache-2.0
#include "pgi/feedback.hpp"

#include <cmath>
#include <stdexcept>

#include "pgi/random.hpp"

namespace pgi {

Codebook gen_rvq_codebook(int dim, int bits, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("gen_rvq_codebook: dimension must be >= 1");
  if (bits < 0 || bits > 20) throw std::invalid_argument("gen_rvq_codebook: bits must lie in [0, 20]");
  Codebook c;
  c.dimension = dim;
  c.bits = bits;
  c.seed = seed;
  const Eigen::Index n = Eigen::Index{1} << bits;
  c.words.resize(dim, n);
  Rng rng(seed);
  for (Eigen::Index i = 0; i < n; ++i) c.words.col(i) = unit_sphere_vector(rng, dim);
  return c;
}

FeedbackMessage quantize_pgi(const CVector& g, const Codebook& codebook) {
  if (g.size() != codebook.dimension)
    throw std::invalid_argument("quantize_pgi: vector length differs from codebook dimension");
  const double nrm = g.norm();
  if (!(nrm > 0.0)) throw std::domain_error("quantize_pgi: zero vector has no direction");
  const Eigen::VectorXd corr = (codebook.words.adjoint() * g).cwiseAbs2();
  int best = 0;
  for (Eigen::Index i = 1; i < corr.size(); ++i)
    if (corr(i) > corr(best)) best = static_cast<int>(i);
  return {best, nrm};
}

double codeword_gain(const CVector& g, const Codebook& codebook, int index) {
  const double nrm = g.norm();
  if (!(nrm > 0.0)) throw std::domain_error("codeword_gain: zero vector");
  return std::norm(codebook.words.col(index).dot(g)) / (nrm * nrm);
}

CVector reconstruct_pgi(const FeedbackMessage& msg, const Codebook& codebook) {
  if (msg.index < 0 || msg.index >= codebook.size())
    throw std::out_of_range("reconstruct_pgi: codeword index out of range");
  return msg.magnitude * codebook.words.col(msg.index);
}

CVector stack_user_blocks(const PairGrid<CVector>& blocks, int k) {
  Eigen::Index len = 0;
  for (int m = 0; m < blocks.num_bs(); ++m) len += blocks(m, k).size();
  CVector out(len);
  Eigen::Index off = 0;
  for (int m = 0; m < blocks.num_bs(); ++m) {
    out.segment(off, blocks(m, k).size()) = blocks(m, k);
    off += blocks(m, k).size();
  }
  return out;
}

std::vector<CVector> split_user_blocks(const CVector& stacked, const std::vector<int>& sizes) {
  std::vector<CVector> out;
  Eigen::Index off = 0;
  for (int s : sizes) {
    if (off + s > stacked.size()) throw std::invalid_argument("split_user_blocks: sizes exceed vector");
    out.emplace_back(stacked.segment(off, s));
    off += s;
  }
  if (off != stacked.size()) throw std::invalid_argument("split_user_blocks: sizes do not cover vector");
  return out;
}

std::vector<CVector> csi_baseline_feedback(const std::vector<CVector>& channels, const Codebook& full) {
  std::vector<int> sizes;
  Eigen::Index len = 0;
  for (const auto& h : channels) {
    sizes.push_back(static_cast<int>(h.size()));
    len += h.size();
  }
  if (len != full.dimension)
    throw std::invalid_argument("csi_baseline_feedback: codebook dimension must equal M*N");
  CVector stacked(len);
  Eigen::Index off = 0;
  for (const auto& h : channels) {
    stacked.segment(off, h.size()) = h;
    off += h.size();
  }
  const FeedbackMessage msg = quantize_pgi(stacked, full);
  return split_user_blocks(reconstruct_pgi(msg, full), sizes);
}

double csi_bits_rule(int num_antennas, double snr_db) { return (num_antennas - 1) / 3.0 * snr_db; }

PairGrid<CVector> rzf_precoders(const PairGrid<CVector>& channel_estimates, double regularization) {
  const int M = channel_estimates.num_bs();
  const int K = channel_estimates.num_users();
  std::vector<int> sizes(M);
  Eigen::Index rows = 0;
  for (int m = 0; m < M; ++m) {
    sizes[m] = static_cast<int>(channel_estimates(m, 0).size());
    rows += sizes[m];
  }
  CMatrix h(rows, K);
  for (int k = 0; k < K; ++k) h.col(k) = stack_user_blocks(channel_estimates, k);
  const CMatrix gram = h.adjoint() * h + regularization * CMatrix::Identity(K, K);
  CMatrix w = h * gram.ldlt().solve(CMatrix::Identity(K, K));
  PairGrid<CVector> out(M, K);
  const double target = std::sqrt(static_cast<double>(M));
  for (int k = 0; k < K; ++k) {
    const double n = w.col(k).norm();
    if (n > 0.0) w.col(k) *= target / n;
    auto parts = split_user_blocks(w.col(k), sizes);
    for (int m = 0; m < M; ++m) out(m, k) = std::move(parts[m]);
  }
  return out;
}

}  // namespace pgi
