// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace pgi {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

// Dense container indexed by (bs, user), bs-major.
template <typename T>
class PairGrid {
 public:
  PairGrid() = default;
  PairGrid(int num_bs, int num_users, const T& init = T{})
      : m_(num_bs), k_(num_users), data_(static_cast<std::size_t>(num_bs) * num_users, init) {}

  int num_bs() const { return m_; }
  int num_users() const { return k_; }

  T& operator()(int m, int k) { return data_[index(m, k)]; }
  const T& operator()(int m, int k) const { return data_[index(m, k)]; }

  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

 private:
  std::size_t index(int m, int k) const {
    if (m < 0 || m >= m_ || k < 0 || k >= k_) throw std::out_of_range("PairGrid index");
    return static_cast<std::size_t>(m) * k_ + k;
  }
  int m_ = 0;
  int k_ = 0;
  std::vector<T> data_;
};

}  // namespace pgi
