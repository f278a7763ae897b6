// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace pgi {

// Eigensolver or factorization failure.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A closed-form bound whose arguments leave its domain.
struct InfeasibleBound : std::domain_error {
  using std::domain_error::domain_error;
};

// Persisted table does not match the expected layout or version.
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pgi
