// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "pgi/linalg.hpp"
#include "pgi/random.hpp"

namespace pgi {

using IndexSet = std::vector<int>;  // sorted 0-based path indices

struct SelectionState {
  PairGrid<IndexSet> index_sets;
  PairGrid<CMatrix> precoders;  // N x |set| per (bs, user)
  std::vector<double> slnr;     // largest generalized eigenvalue per user

  int num_bs() const { return index_sets.num_bs(); }
  int num_users() const { return index_sets.num_users(); }
  int path_count(int k) const;
  int path_count(int m, int k) const { return static_cast<int>(index_sets(m, k).size()); }

  // Column-major within each block, BS-major across blocks.
  CVector stacked_precoder(int k) const;
  void set_stacked_precoder(int k, const CVector& x, int num_antennas);
};

// Every path selected for every pair, precoders empty.
SelectionState full_selection(const PairGrid<CMatrix>& steering);

// Columns of A picked by the index set.
CMatrix selected_columns(const CMatrix& a, const IndexSet& set);

struct SlnrOperands {
  int user = 0;
  int num_bs = 0;
  int num_antennas = 0;
  double noise_per_bs = 0.0;            // sigma^2 / M
  std::vector<int> copies;                 // |set(m, user)|
  std::vector<std::vector<CMatrix>> gram;  // [m][j] A(m,j) A(m,j)^H, j over all users
  CVector mu;                           // stacked vec of selected steering columns

  int dimension() const { return static_cast<int>(mu.size()); }
  // Block diagonal over BSs of copies(m) repeats of gram[m][j].
  CMatrix gamma(int j) const;
  CMatrix signal_matrix() const;   // mu mu^H + gamma(user)
  CMatrix leakage_matrix() const;  // sum_{j != user} gamma(j) + noise_per_bs I
};

SlnrOperands build_slnr_operands(const PairGrid<CMatrix>& steering,
                                 const PairGrid<IndexSet>& index_sets, double noise_var, int k);

struct SlnrSolution {
  CVector x;         // norm sqrt(M)
  double value = 0;  // largest generalized eigenvalue
  bool used_fallback = false;
};

// Exploits the block structure: per-BS Cholesky of the leakage block and a rank-one secular
// equation. Falls back to the dense solver if the residual check fails.
SlnrSolution slnr_precoder(const SlnrOperands& ops);

// Dense generalized Hermitian eigensolver on the assembled matrices.
SlnrSolution slnr_precoder_dense(const SlnrOperands& ops);

// Re-solves every user's precoder for the current index sets.
void optimize_precoders(const PairGrid<CMatrix>& steering, SelectionState& state, double noise_var);

struct PrunedPath {
  int bs;
  int path;
};

// Removes the selected path whose precoder column has the least norm (ties: smallest (bs, path)).
PrunedPath prune_one_path(SelectionState& state, int k, int budget);

using LevelObserver = std::function<void(const SelectionState&)>;

// Alternating selection: optimize all precoders, then prune one path from every user above
// budget (ascending user order), until every user holds `budget` paths. The observer sees the
// state after each optimization.
SelectionState select_dominating_paths(const PairGrid<CMatrix>& steering, int budget,
                                       double noise_var, const LevelObserver& observer = {});

// Uniformly random budget-sized subset per user, then SLNR precoders.
SelectionState random_path_selection(const PairGrid<CMatrix>& steering, int budget,
                                     double noise_var, Rng& rng);

struct BudgetChoice {
  int budget;
  std::vector<double> objective;  // index l - 1
};

// Prunes from M*P down to 1 and scores each level by sum_k ideal rate minus rate-gap bound.
BudgetChoice choose_path_budget(const PairGrid<CMatrix>& steering, int bits, double snr_db,
                                double noise_var);

// Scores l = 1..P with the single-cell lower bound; delta defaults to 1/l.
BudgetChoice choose_path_budget_single_cell(int num_paths, int bits, double snr, double noise_var,
                                            std::optional<double> delta = std::nullopt);

}  // namespace pgi
