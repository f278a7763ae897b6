// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "pgi/linalg.hpp"

namespace pgi {

using Rng = std::mt19937_64;

// Counter-based child seed: mixes base with each index through splitmix64.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> indices);

// CN(0, 1): real and imaginary parts each N(0, 1/2).
cplx complex_normal(Rng& rng);
CVector complex_normal_vector(Rng& rng, int n);
CMatrix complex_normal_matrix(Rng& rng, int rows, int cols);

// Uniform on the unit sphere of C^n.
CVector unit_sphere_vector(Rng& rng, int n);

}  // namespace pgi
