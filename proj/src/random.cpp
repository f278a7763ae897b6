// SPDX-License-Identifier: Apache-2.0
#include "pgi/random.hpp"

#include <cmath>

namespace pgi {

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}
}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> indices) {
  std::uint64_t s = splitmix64(base);
  for (auto i : indices) s = splitmix64(s ^ splitmix64(i + 0x632BE59BD9B4E019ULL));
  return s;
}

cplx complex_normal(Rng& rng) {
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  double re = nd(rng);
  double im = nd(rng);
  return {re, im};
}

CVector complex_normal_vector(Rng& rng, int n) {
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = complex_normal(rng);
  return v;
}

CMatrix complex_normal_matrix(Rng& rng, int rows, int cols) {
  CMatrix a(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) a(r, c) = complex_normal(rng);
  return a;
}

CVector unit_sphere_vector(Rng& rng, int n) {
  for (;;) {
    CVector v = complex_normal_vector(rng, n);
    double nrm = v.norm();
    if (nrm > 0.0) return v / nrm;
  }
}

}  // namespace pgi
