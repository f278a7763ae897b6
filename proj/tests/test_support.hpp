// SPDX-License-Identifier: Apache-2.0
// Small generators and helpers shared by the unit tests.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "pgi/config.hpp"
#include "pgi/core_model.hpp"
#include "pgi/linalg.hpp"
#include "pgi/random.hpp"

namespace pgi::test {

inline double deg(double d) { return d * std::numbers::pi / 180.0; }

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline double uniform_real(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

// Steering for a seeded scenario under the given config.
inline PairGrid<CMatrix> scenario_steering(const SystemConfig& c, std::uint64_t seed) {
  const Geometry g = draw_scenario(c, seed);
  return steering_from_angles(g.path_aods, c.num_antennas, c.spacing_ratio);
}

// Steering with angles spread uniformly over the whole half plane (well separated on average).
inline PairGrid<CMatrix> wide_steering(Rng& rng, int M, int K, int N, int P) {
  PairGrid<CMatrix> s(M, K);
  for (int m = 0; m < M; ++m)
    for (int k = 0; k < K; ++k) {
      RVector th(P);
      for (int i = 0; i < P; ++i) th(i) = uniform_real(rng, -1.3, 1.3);
      s(m, k) = steering_matrix(th, N, 0.5);
    }
  return s;
}

inline CMatrix random_hermitian_psd(Rng& rng, int n, int rank) {
  const CMatrix b = complex_normal_matrix(rng, n, rank);
  return b * b.adjoint();
}

// Mean and standard error of a sample.
struct Moments {
  double n = 0, s = 0, s2 = 0;
  void add(double x) { n += 1; s += x; s2 += x * x; }
  double mean() const { return s / n; }
  double var() const { return (s2 - n * mean() * mean()) / (n - 1); }
  double se() const { return std::sqrt(var() / n); }
};

}  // namespace pgi::test
