// SPDX-License-Identifier: Apache-2.0
#include "pgi/aod_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "pgi/core_model.hpp"

namespace pgi {

CovarianceEstimate sample_covariance(const std::vector<CVector>& snapshots) {
  if (snapshots.empty()) throw std::invalid_argument("sample_covariance: no snapshots");
  const Eigen::Index n = snapshots.front().size();
  CovarianceEstimate c;
  c.matrix = CMatrix::Zero(n, n);
  for (const auto& x : snapshots) {
    if (x.size() != n) throw std::invalid_argument("sample_covariance: snapshot length mismatch");
    c.matrix.noalias() += x * x.adjoint();
  }
  c.matrix /= static_cast<double>(snapshots.size());
  c.matrix = 0.5 * (c.matrix + c.matrix.adjoint()).eval();
  c.snapshot_count = static_cast<int>(snapshots.size());
  return c;
}

std::vector<double> angle_grid(double step_deg) {
  if (!(step_deg > 0.0)) throw std::invalid_argument("angle_grid: step must be > 0");
  std::vector<double> g;
  const int half = static_cast<int>(std::floor(90.0 / step_deg - 1e-9));
  for (int i = -half; i <= half; ++i) g.push_back(i * step_deg * std::numbers::pi / 180.0);
  return g;
}

MusicSpectrum music_spectrum(const CovarianceEstimate& cov, int signal_dim,
                             const std::vector<double>& grid, double spacing_ratio) {
  const int n = static_cast<int>(cov.matrix.rows());
  if (signal_dim < 0 || signal_dim >= n) throw std::invalid_argument("music_spectrum: signal dimension must be < N");
  if (grid.empty()) throw std::invalid_argument("music_spectrum: empty grid");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(cov.matrix);
  if (es.info() != Eigen::Success) throw std::runtime_error("music_spectrum: eigensolver failed");
  const CMatrix en = es.eigenvectors().leftCols(n - signal_dim);  // ascending eigenvalues
  const double floor = 1e-12 * std::max(cov.matrix.trace().real(), 1e-300);
  MusicSpectrum s;
  s.grid = grid;
  s.signal_dim = signal_dim;
  s.spacing_ratio = spacing_ratio;
  s.values.reserve(grid.size());
  for (double th : grid) {
    const CVector a = steering_vector(th, n, spacing_ratio);
    const double den = (en.adjoint() * a).squaredNorm();
    s.values.push_back(1.0 / std::max(den, floor));
  }
  return s;
}

AodEstimate estimate_aods(const MusicSpectrum& spectrum, int count) {
  const auto& v = spectrum.values;
  const auto& g = spectrum.grid;
  const std::size_t n = v.size();
  std::vector<std::size_t> peaks;
  for (std::size_t i = 0; i < n; ++i) {
    const bool left = i == 0 || v[i] > v[i - 1];
    const bool right = i + 1 == n || v[i] >= v[i + 1];
    if (left && right && n > 1) peaks.push_back(i);
  }
  std::stable_sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
  AodEstimate out;
  out.shortfall = static_cast<int>(peaks.size()) < count;
  const std::size_t take = std::min<std::size_t>(peaks.size(), static_cast<std::size_t>(std::max(count, 0)));
  for (std::size_t p = 0; p < take; ++p) {
    const std::size_t i = peaks[p];
    double th = g[i];
    if (i > 0 && i + 1 < n) {
      // Vertex of the parabola through the three samples.
      const double y0 = v[i - 1], y1 = v[i], y2 = v[i + 1];
      const double den = y0 - 2.0 * y1 + y2;
      if (den < 0.0) {
        const double off = 0.5 * (y0 - y2) / den;
        const double h = 0.5 * (g[i + 1] - g[i - 1]);
        th += std::clamp(off, -0.5, 0.5) * h;
      }
    }
    out.angles.push_back(th);
  }
  std::sort(out.angles.begin(), out.angles.end());
  return out;
}

std::vector<CVector> uplink_snapshots(const CMatrix& steering, int count, double noise_var, Rng& rng) {
  std::vector<CVector> out;
  const double s = std::sqrt(std::max(noise_var, 0.0));
  for (int t = 0; t < count; ++t) {
    CVector x = steering * complex_normal_vector(rng, static_cast<int>(steering.cols()));
    if (s > 0.0) x += s * complex_normal_vector(rng, static_cast<int>(steering.rows()));
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace pgi
