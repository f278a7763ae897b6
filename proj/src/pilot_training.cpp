// SPDX-License-Identifier: Apache-2.0
#include "pgi/pilot_training.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/QR>
#include <Eigen/SVD>

namespace pgi {

PilotPrecoder build_pilot_precoder(const CMatrix& steering, const IndexSet& set) {
  const Eigen::Index n = steering.rows();
  const Eigen::Index p = steering.cols();
  if (p > n) throw std::invalid_argument("build_pilot_precoder: more paths than antennas");
  PilotPrecoder out;
  out.selection = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(set.size()), p);
  for (std::size_t r = 0; r < set.size(); ++r) {
    if (set[r] < 0 || set[r] >= p) throw std::out_of_range("build_pilot_precoder: path index");
    out.selection(static_cast<Eigen::Index>(r), set[r]) = 1.0;
  }

  const Eigen::VectorXd sv = Eigen::JacobiSVD<CMatrix>(steering).singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  out.condition = smin > 0.0 ? (smax / smin) * (smax / smin) : std::numeric_limits<double>::infinity();

  CMatrix pinv;
  if (out.condition <= kPilotConditionGuard) {
    // A^+ = R^-1 Q^H from a pivoted QR, without forming A^H A.
    Eigen::ColPivHouseholderQR<CMatrix> qr(steering);
    pinv = qr.solve(CMatrix::Identity(n, n));
  } else {
    // (A^H A + eps I)^-1 A^H as the least-squares solve of [A; sqrt(eps) I].
    const double eps = 1e-10 * steering.squaredNorm() / static_cast<double>(p);
    CMatrix stacked(n + p, p);
    stacked << steering, std::sqrt(eps) * CMatrix::Identity(p, p);
    CMatrix rhs = CMatrix::Zero(n + p, n);
    rhs.topRows(n) = CMatrix::Identity(n, n);
    pinv = Eigen::ColPivHouseholderQR<CMatrix>(stacked).solve(rhs);
    out.regularized = true;
  }
  out.matrix = out.selection.cast<cplx>() * pinv;
  return out;
}

PilotSequences gen_pilot_sequences(const PairGrid<int>& sizes, std::uint64_t seed) {
  int tau = 0;
  for (int s : sizes) {
    if (s < 0) throw std::invalid_argument("gen_pilot_sequences: negative block size");
    tau += s;
  }
  PilotSequences out;
  out.length = tau;
  out.blocks = PairGrid<CMatrix>(sizes.num_bs(), sizes.num_users());
  CMatrix q(tau, tau);
  if (tau > 0) {
    Rng rng(seed);
    const CMatrix g = complex_normal_matrix(rng, tau, tau);
    q = Eigen::HouseholderQR<CMatrix>(g).householderQ();
  }
  int row = 0;
  for (int k = 0; k < sizes.num_users(); ++k) {
    for (int m = 0; m < sizes.num_bs(); ++m) {
      out.blocks(m, k) = q.middleRows(row, sizes(m, k));
      row += sizes(m, k);
    }
  }
  return out;
}

PilotPlan make_pilot_plan(const PairGrid<CMatrix>& steering, const PairGrid<IndexSet>& sets,
                          std::uint64_t seed) {
  PilotPlan plan;
  plan.precoders = PairGrid<PilotPrecoder>(steering.num_bs(), steering.num_users());
  PairGrid<int> sizes(steering.num_bs(), steering.num_users());
  for (int m = 0; m < steering.num_bs(); ++m) {
    for (int k = 0; k < steering.num_users(); ++k) {
      plan.precoders(m, k) = build_pilot_precoder(steering(m, k), sets(m, k));
      if (plan.precoders(m, k).regularized) ++plan.regularized_count;
      sizes(m, k) = static_cast<int>(sets(m, k).size());
    }
  }
  plan.sequences = gen_pilot_sequences(sizes, seed);
  return plan;
}

std::vector<TrainingObservation> simulate_training(const PairGrid<CVector>& channels,
                                                   const PilotPlan& plan, double noise_var,
                                                   const std::vector<CVector>& noise) {
  const int M = channels.num_bs();
  const int K = channels.num_users();
  const int tau = plan.sequences.length;
  if (plan.precoders.num_bs() != M || plan.precoders.num_users() != K)
    throw std::invalid_argument("simulate_training: plan shape mismatch");
  if (static_cast<int>(noise.size()) != K) throw std::invalid_argument("simulate_training: noise count");
  std::vector<TrainingObservation> out(K);
  for (int k = 0; k < K; ++k) {
    if (noise[k].size() != tau) throw std::invalid_argument("simulate_training: noise length");
    // Accumulate conj(y), whose terms are Psi^H (W h).
    CVector ystar = CVector::Zero(tau);
    for (int m = 0; m < M; ++m) {
      for (int j = 0; j < K; ++j) {
        const CMatrix& w = plan.precoders(m, j).matrix;
        if (w.rows() == 0) continue;
        const CVector s = w * channels(m, k);
        ystar.noalias() += plan.sequences.blocks(m, j).adjoint() * s;
      }
    }
    out[k].received = ystar.conjugate() + noise[k];
    out[k].noise_var = noise_var;
  }
  return out;
}

std::vector<TrainingObservation> simulate_training(const PairGrid<CVector>& channels,
                                                   const PilotPlan& plan, double noise_var, Rng& rng) {
  if (noise_var < 0.0) throw std::invalid_argument("simulate_training: negative noise variance");
  std::vector<CVector> noise(channels.num_users());
  const double s = std::sqrt(noise_var);
  for (auto& z : noise) z = s * complex_normal_vector(rng, plan.sequences.length);
  return simulate_training(channels, plan, noise_var, noise);
}

std::vector<TrainingObservation> simulate_training(const PairGrid<CVector>& channels,
                                                   const PilotPlan& plan, double noise_var,
                                                   std::uint64_t seed) {
  Rng rng(seed);
  return simulate_training(channels, plan, noise_var, rng);
}

CVector despread(const TrainingObservation& obs, const CMatrix& sequence) {
  if (sequence.cols() != obs.received.size()) throw std::invalid_argument("despread: length mismatch");
  return sequence * obs.received.conjugate();
}

CVector lmmse_pgi(const TrainingObservation& obs, const CMatrix& sequence, double noise_var) {
  if (noise_var < 0.0) throw std::invalid_argument("lmmse_pgi: negative noise variance");
  return despread(obs, sequence) / (1.0 + noise_var);
}

}  // namespace pgi
