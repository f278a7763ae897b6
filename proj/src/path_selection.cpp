// SPDX-License-Identifier: Apache-2.0
#include "pgi/path_selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "pgi/errors.hpp"
#include "pgi/rate_analysis.hpp"
#include "pgi/theory_bounds.hpp"

namespace pgi {

int SelectionState::path_count(int k) const {
  int n = 0;
  for (int m = 0; m < num_bs(); ++m) n += path_count(m, k);
  return n;
}

CVector SelectionState::stacked_precoder(int k) const {
  Eigen::Index len = 0;
  for (int m = 0; m < num_bs(); ++m) len += precoders(m, k).size();
  CVector x(len);
  Eigen::Index off = 0;
  for (int m = 0; m < num_bs(); ++m) {
    const CMatrix& v = precoders(m, k);
    x.segment(off, v.size()) = v.reshaped();
    off += v.size();
  }
  return x;
}

void SelectionState::set_stacked_precoder(int k, const CVector& x, int num_antennas) {
  Eigen::Index off = 0;
  for (int m = 0; m < num_bs(); ++m) {
    const int c = path_count(m, k);
    const Eigen::Index len = static_cast<Eigen::Index>(num_antennas) * c;
    if (off + len > x.size()) throw std::invalid_argument("set_stacked_precoder: vector too short");
    precoders(m, k) = x.segment(off, len).reshaped(num_antennas, c);
    off += len;
  }
  if (off != x.size()) throw std::invalid_argument("set_stacked_precoder: vector too long");
}

SelectionState full_selection(const PairGrid<CMatrix>& steering) {
  SelectionState s;
  s.index_sets = PairGrid<IndexSet>(steering.num_bs(), steering.num_users());
  s.precoders = PairGrid<CMatrix>(steering.num_bs(), steering.num_users());
  for (int m = 0; m < steering.num_bs(); ++m) {
    for (int k = 0; k < steering.num_users(); ++k) {
      IndexSet set(steering(m, k).cols());
      std::iota(set.begin(), set.end(), 0);
      s.index_sets(m, k) = std::move(set);
    }
  }
  s.slnr.assign(steering.num_users(), 0.0);
  return s;
}

CMatrix selected_columns(const CMatrix& a, const IndexSet& set) {
  CMatrix out(a.rows(), static_cast<Eigen::Index>(set.size()));
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set[i] < 0 || set[i] >= a.cols()) throw std::out_of_range("selected_columns: path index");
    out.col(i) = a.col(set[i]);
  }
  return out;
}

CMatrix SlnrOperands::gamma(int j) const {
  const int d = dimension();
  CMatrix g = CMatrix::Zero(d, d);
  Eigen::Index off = 0;
  for (int m = 0; m < num_bs; ++m) {
    for (int c = 0; c < copies[m]; ++c) {
      g.block(off, off, num_antennas, num_antennas) = gram[m][j];
      off += num_antennas;
    }
  }
  return g;
}

CMatrix SlnrOperands::signal_matrix() const { return mu * mu.adjoint() + gamma(user); }

CMatrix SlnrOperands::leakage_matrix() const {
  const int d = dimension();
  CMatrix w = noise_per_bs * CMatrix::Identity(d, d);
  const int k_users = gram.empty() ? 0 : static_cast<int>(gram[0].size());
  for (int j = 0; j < k_users; ++j)
    if (j != user) w += gamma(j);
  return w;
}

SlnrOperands build_slnr_operands(const PairGrid<CMatrix>& steering,
                                 const PairGrid<IndexSet>& index_sets, double noise_var, int k) {
  const int M = steering.num_bs();
  const int K = steering.num_users();
  if (index_sets.num_bs() != M || index_sets.num_users() != K)
    throw std::invalid_argument("build_slnr_operands: index grid shape mismatch");
  if (k < 0 || k >= K) throw std::out_of_range("build_slnr_operands: user index");
  if (!(noise_var > 0.0)) throw std::invalid_argument("build_slnr_operands: noise variance must be > 0");
  SlnrOperands ops;
  ops.user = k;
  ops.num_bs = M;
  ops.num_antennas = static_cast<int>(steering(0, k).rows());
  ops.noise_per_bs = noise_var / M;
  ops.copies.resize(M);
  ops.gram.resize(M);
  int total = 0;
  for (int m = 0; m < M; ++m) {
    const CMatrix& a = steering(m, k);
    if (a.rows() != ops.num_antennas) throw std::invalid_argument("build_slnr_operands: antenna count mismatch");
    for (int idx : index_sets(m, k))
      if (idx < 0 || idx >= a.cols()) throw std::invalid_argument("build_slnr_operands: path index out of range");
    ops.copies[m] = static_cast<int>(index_sets(m, k).size());
    total += ops.copies[m];
    ops.gram[m].resize(K);
    for (int j = 0; j < K; ++j) ops.gram[m][j] = steering(m, j) * steering(m, j).adjoint();
  }
  if (total == 0) throw std::invalid_argument("build_slnr_operands: user has no selected paths");
  ops.mu.resize(static_cast<Eigen::Index>(total) * ops.num_antennas);
  Eigen::Index off = 0;
  for (int m = 0; m < M; ++m) {
    for (int idx : index_sets(m, k)) {
      ops.mu.segment(off, ops.num_antennas) = steering(m, k).col(idx);
      off += ops.num_antennas;
    }
  }
  return ops;
}

namespace {

// Per-BS block products: out = blockdiag(I (x) G_m) x.
CVector block_apply(const SlnrOperands& ops, const std::vector<CMatrix>& per_bs, const CVector& x) {
  CVector out(x.size());
  const int n = ops.num_antennas;
  Eigen::Index off = 0;
  for (int m = 0; m < ops.num_bs; ++m) {
    for (int c = 0; c < ops.copies[m]; ++c) {
      out.segment(off, n) = per_bs[m] * x.segment(off, n);
      off += n;
    }
  }
  return out;
}

double relative_residual(const SlnrOperands& ops, const std::vector<CMatrix>& own,
                         const std::vector<CMatrix>& leak, const CVector& x, double lambda) {
  const CVector ux = ops.mu * ops.mu.dot(x) + block_apply(ops, own, x);
  const CVector wx = block_apply(ops, leak, x);
  const double nu = ux.norm();
  return nu > 0.0 ? (ux - lambda * wx).norm() / nu : (lambda * wx).norm();
}

}  // namespace

SlnrSolution slnr_precoder_dense(const SlnrOperands& ops) {
  const CMatrix u = ops.signal_matrix();
  const CMatrix w = ops.leakage_matrix();
  // Congruence W = R R^H, then the Hermitian problem on R^-1 U R^-H. Eigen's generalized
  // self-adjoint solver returns wrong spectra for complex input here, so it is not used.
  Eigen::LLT<CMatrix> llt(w);
  if (llt.info() != Eigen::Success) {
    throw SolverError("slnr_precoder: leakage matrix not positive definite (diagonal min " +
                      std::to_string(w.diagonal().real().minCoeff()) + ")");
  }
  const CMatrix t = llt.matrixL().solve(u);
  CMatrix c = llt.matrixL().solve(t.adjoint()).adjoint();
  c = 0.5 * (c + c.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(c);
  if (es.info() != Eigen::Success) throw SolverError("slnr_precoder: Hermitian eigensolver did not converge");
  const Eigen::Index last = es.eigenvalues().size() - 1;
  const CVector x = llt.matrixU().solve(es.eigenvectors().col(last));
  SlnrSolution s;
  s.value = es.eigenvalues()(last);
  s.x = x * (std::sqrt(static_cast<double>(ops.num_bs)) / x.norm());
  return s;
}

SlnrSolution slnr_precoder(const SlnrOperands& ops) {
  const int n = ops.num_antennas;
  const int M = ops.num_bs;
  const int K = ops.gram.empty() ? 0 : static_cast<int>(ops.gram[0].size());
  std::vector<CMatrix> leak(M), own(M), lower(M), basis(M);
  std::vector<RVector> eig(M);
  for (int m = 0; m < M; ++m) {
    leak[m] = ops.noise_per_bs * CMatrix::Identity(n, n);
    for (int j = 0; j < K; ++j)
      if (j != ops.user) leak[m] += ops.gram[m][j];
    own[m] = ops.gram[m][ops.user];
    if (ops.copies[m] == 0) continue;
    Eigen::LLT<CMatrix> llt(leak[m]);
    if (llt.info() != Eigen::Success) return slnr_precoder_dense(ops);
    lower[m] = llt.matrixL();
    CMatrix t = llt.matrixL().solve(own[m]);
    CMatrix b = llt.matrixL().solve(t.adjoint()).adjoint();
    b = 0.5 * (b + b.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(b);
    if (es.info() != Eigen::Success) return slnr_precoder_dense(ops);
    eig[m] = es.eigenvalues();
    basis[m] = es.eigenvectors();
  }

  // Rotated rank-one update diag(d) + z z^H.
  const Eigen::Index dim = ops.mu.size();
  RVector d(dim);
  CVector z(dim);
  Eigen::Index off = 0;
  for (int m = 0; m < M; ++m) {
    for (int c = 0; c < ops.copies[m]; ++c) {
      CVector seg = lower[m].triangularView<Eigen::Lower>().solve(ops.mu.segment(off, n));
      z.segment(off, n) = basis[m].adjoint() * seg;
      d.segment(off, n) = eig[m];
      off += n;
    }
  }
  const RVector z2 = z.cwiseAbs2();
  const double dmax = d.maxCoeff();
  const double znorm2 = z2.sum();
  if (!(znorm2 > 0.0)) return slnr_precoder_dense(ops);

  auto secular = [&](double lam) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < dim; ++i) s += z2(i) / (lam - d(i));
    return 1.0 - s;
  };
  double lo = dmax, hi = dmax + znorm2;
  for (int it = 0; it < 200 && hi - lo > 4 * std::numeric_limits<double>::epsilon() * std::abs(hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (secular(mid) < 0.0) lo = mid;
    else hi = mid;
  }
  const double lambda = hi;

  CVector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = z(i) / (lambda - d(i));
  CVector x(dim);
  off = 0;
  for (int m = 0; m < M; ++m) {
    for (int c = 0; c < ops.copies[m]; ++c) {
      CVector y = basis[m] * v.segment(off, n);
      x.segment(off, n) = lower[m].adjoint().triangularView<Eigen::Upper>().solve(y);
      off += n;
    }
  }
  const double nx = x.norm();
  if (!(nx > 0.0) || !std::isfinite(nx)) return slnr_precoder_dense(ops);
  x *= std::sqrt(static_cast<double>(M)) / nx;
  if (relative_residual(ops, own, leak, x, lambda) > 1e-10) {
    SlnrSolution s = slnr_precoder_dense(ops);
    s.used_fallback = true;
    return s;
  }
  SlnrSolution s;
  s.x = std::move(x);
  s.value = lambda;
  return s;
}

void optimize_precoders(const PairGrid<CMatrix>& steering, SelectionState& state, double noise_var) {
  const int n = static_cast<int>(steering(0, 0).rows());
  state.slnr.assign(state.num_users(), 0.0);
  for (int k = 0; k < state.num_users(); ++k) {
    const SlnrOperands ops = build_slnr_operands(steering, state.index_sets, noise_var, k);
    const SlnrSolution sol = slnr_precoder(ops);
    state.set_stacked_precoder(k, sol.x, n);
    state.slnr[k] = sol.value;
  }
}

PrunedPath prune_one_path(SelectionState& state, int k, int budget) {
  if (state.path_count(k) <= budget)
    throw std::logic_error("prune_one_path: user " + std::to_string(k) + " already at budget");
  int best_m = -1, best_pos = -1;
  double best = std::numeric_limits<double>::infinity();
  for (int m = 0; m < state.num_bs(); ++m) {
    const CMatrix& v = state.precoders(m, k);
    if (v.cols() != state.path_count(m, k))
      throw std::logic_error("prune_one_path: precoders out of sync with index sets");
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
      const double nrm = v.col(c).norm();
      if (nrm < best) {
        best = nrm;
        best_m = m;
        best_pos = static_cast<int>(c);
      }
    }
  }
  IndexSet& set = state.index_sets(best_m, k);
  const int path = set[best_pos];
  set.erase(set.begin() + best_pos);
  CMatrix& v = state.precoders(best_m, k);
  CMatrix kept(v.rows(), v.cols() - 1);
  for (Eigen::Index c = 0, o = 0; c < v.cols(); ++c)
    if (c != best_pos) kept.col(o++) = v.col(c);
  v = std::move(kept);
  return {best_m, path};
}

SelectionState select_dominating_paths(const PairGrid<CMatrix>& steering, int budget,
                                       double noise_var, const LevelObserver& observer) {
  const int total = steering.num_bs() * static_cast<int>(steering(0, 0).cols());
  if (budget < 1 || budget > total)
    throw std::invalid_argument("select_dominating_paths: budget must lie in [1, M*P]");
  SelectionState state = full_selection(steering);
  for (;;) {
    optimize_precoders(steering, state, noise_var);
    if (observer) observer(state);
    bool pruned = false;
    for (int k = 0; k < state.num_users(); ++k) {
      if (state.path_count(k) > budget) {
        prune_one_path(state, k, budget);
        pruned = true;
      }
    }
    if (!pruned) break;
  }
  return state;
}

SelectionState random_path_selection(const PairGrid<CMatrix>& steering, int budget,
                                     double noise_var, Rng& rng) {
  const int M = steering.num_bs();
  const int P = static_cast<int>(steering(0, 0).cols());
  if (budget < 1 || budget > M * P)
    throw std::invalid_argument("random_path_selection: budget must lie in [1, M*P]");
  SelectionState state = full_selection(steering);
  std::vector<int> pool(M * P);
  for (int k = 0; k < state.num_users(); ++k) {
    std::iota(pool.begin(), pool.end(), 0);
    std::shuffle(pool.begin(), pool.end(), rng);
    for (int m = 0; m < M; ++m) state.index_sets(m, k).clear();
    for (int t = 0; t < budget; ++t) state.index_sets(pool[t] / P, k).push_back(pool[t] % P);
    for (int m = 0; m < M; ++m) std::sort(state.index_sets(m, k).begin(), state.index_sets(m, k).end());
  }
  optimize_precoders(steering, state, noise_var);
  return state;
}

BudgetChoice choose_path_budget(const PairGrid<CMatrix>& steering, int bits, double snr_db,
                                double noise_var) {
  const int total = steering.num_bs() * static_cast<int>(steering(0, 0).cols());
  const double snr = std::pow(10.0, snr_db / 10.0);
  BudgetChoice out{1, std::vector<double>(total, 0.0)};
  select_dominating_paths(steering, 1, noise_var, [&](const SelectionState& s) {
    const int level = s.path_count(0);
    const auto rates = ideal_rate_closed_form(steering, s, noise_var);
    double score = 0.0;
    for (int k = 0; k < s.num_users(); ++k) {
      double gap = 0.0;
      if (level >= 2) gap = rate_gap_bound(level, bits, delta_factor(selected_gain_matrix(steering, s, k)).value, snr);
      score += rates[k] - gap;
    }
    out.objective[level - 1] = score;
  });
  out.budget = static_cast<int>(std::max_element(out.objective.begin(), out.objective.end()) -
                                out.objective.begin()) + 1;
  return out;
}

BudgetChoice choose_path_budget_single_cell(int num_paths, int bits, double snr, double noise_var,
                                            std::optional<double> delta) {
  if (num_paths < 1) throw std::invalid_argument("choose_path_budget_single_cell: num_paths >= 1");
  BudgetChoice out{1, std::vector<double>(num_paths, 0.0)};
  for (int l = 1; l <= num_paths; ++l) {
    if (l == 1) out.objective[0] = std::log2(1.0 + 2.0 / noise_var);
    else out.objective[l - 1] = single_cell_rate_bound(l, bits, delta.value_or(1.0 / l), noise_var, snr);
  }
  out.budget = static_cast<int>(std::max_element(out.objective.begin(), out.objective.end()) -
                                out.objective.begin()) + 1;
  return out;
}

}  // namespace pgi
