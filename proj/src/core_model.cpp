// SPDX-License-Identifier: Apache-2.0
#include "pgi/core_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pgi/path_selection.hpp"
#include "pgi/rate_analysis.hpp"

namespace pgi {

CVector steering_vector(double theta, int n, double spacing_ratio) {
  if (n < 1) throw std::invalid_argument("steering_vector: n must be >= 1");
  const double phase = 2.0 * std::numbers::pi * spacing_ratio * std::sin(theta);
  CVector a(n);
  for (int j = 0; j < n; ++j) a(j) = std::polar(1.0, -phase * j);
  return a;
}

CMatrix steering_matrix(const RVector& thetas, int n, double spacing_ratio) {
  CMatrix a(n, thetas.size());
  for (Eigen::Index i = 0; i < thetas.size(); ++i) a.col(i) = steering_vector(thetas(i), n, spacing_ratio);
  return a;
}

double broadside_angle(const Eigen::Vector2d& from, const Eigen::Vector2d& to) {
  const Eigen::Vector2d d = to - from;
  double phi = std::atan2(d.y(), d.x());
  constexpr double half_pi = std::numbers::pi / 2;
  if (phi > half_pi) phi = std::numbers::pi - phi;
  else if (phi <= -half_pi) phi = -std::numbers::pi - phi;
  if (phi <= -half_pi) phi = half_pi;  // exact -pi/2 maps to the closed end
  return phi;
}

Geometry draw_scenario(const SystemConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  std::uniform_real_distribution<double> pos(0.0, config.area_side);
  Geometry g;
  for (int m = 0; m < config.num_bs; ++m) {
    double x = pos(rng);
    g.bs_positions.emplace_back(x, pos(rng));
  }
  for (int k = 0; k < config.num_users; ++k) {
    double x = pos(rng);
    g.user_positions.emplace_back(x, pos(rng));
  }
  g.nominal_aods = PairGrid<double>(config.num_bs, config.num_users);
  g.path_aods = PairGrid<RVector>(config.num_bs, config.num_users);
  const double half = config.angular_spread * std::numbers::pi / 360.0;
  std::uniform_real_distribution<double> off(-half, half);
  for (int m = 0; m < config.num_bs; ++m) {
    for (int k = 0; k < config.num_users; ++k) {
      const double nominal = broadside_angle(g.bs_positions[m], g.user_positions[k]);
      g.nominal_aods(m, k) = nominal;
      RVector th(config.num_paths);
      for (int i = 0; i < config.num_paths; ++i) th(i) = half > 0.0 ? nominal + off(rng) : nominal;
      g.path_aods(m, k) = th;
    }
  }
  return g;
}

PairGrid<CMatrix> steering_from_angles(const PairGrid<RVector>& aods, int n, double spacing_ratio) {
  PairGrid<CMatrix> out(aods.num_bs(), aods.num_users());
  for (int m = 0; m < aods.num_bs(); ++m)
    for (int k = 0; k < aods.num_users(); ++k) out(m, k) = steering_matrix(aods(m, k), n, spacing_ratio);
  return out;
}

PairGrid<CVector> draw_gains(const PairGrid<CMatrix>& steering, Rng& rng) {
  PairGrid<CVector> g(steering.num_bs(), steering.num_users());
  for (int m = 0; m < steering.num_bs(); ++m)
    for (int k = 0; k < steering.num_users(); ++k)
      g(m, k) = complex_normal_vector(rng, static_cast<int>(steering(m, k).cols()));
  return g;
}

ChannelRealization assemble_channel(PairGrid<CMatrix> steering, PairGrid<CVector> gains) {
  if (steering.num_bs() != gains.num_bs() || steering.num_users() != gains.num_users())
    throw std::invalid_argument("assemble_channel: grid shape mismatch");
  ChannelRealization r;
  r.channels = PairGrid<CVector>(steering.num_bs(), steering.num_users());
  for (int m = 0; m < steering.num_bs(); ++m) {
    for (int k = 0; k < steering.num_users(); ++k) {
      if (steering(m, k).cols() != gains(m, k).size())
        throw std::invalid_argument("assemble_channel: path count mismatch");
      r.channels(m, k) = steering(m, k) * gains(m, k);
    }
  }
  r.steering = std::move(steering);
  r.gains = std::move(gains);
  return r;
}

ChannelRealization realize_channel(const Geometry& geometry, const SystemConfig& config,
                                   std::uint64_t seed) {
  auto steering = steering_from_angles(geometry.path_aods, config.num_antennas, config.spacing_ratio);
  Rng rng(seed);
  auto gains = draw_gains(steering, rng);
  return assemble_channel(std::move(steering), std::move(gains));
}

double noise_variance_for_snr(const PairGrid<CMatrix>& steering, const SelectionState& selection,
                              double snr_db) {
  const auto terms = signal_terms(steering, selection);
  double total = 0.0;
  for (const auto& t : terms) total += t.ds_ideal + t.us + t.is;
  total /= static_cast<double>(terms.size());
  if (!(total > 1e-300) || !std::isfinite(total))
    throw std::domain_error("noise_variance_for_snr: total signal power is zero");
  return total / std::pow(10.0, snr_db / 10.0);
}

double noise_variance_for_snr(const ChannelRealization& realization,
                              const SelectionState& selection, double snr_db) {
  return noise_variance_for_snr(realization.steering, selection, snr_db);
}

double calibrate_noise_variance(const PairGrid<CMatrix>& steering, double snr_db, int iterations) {
  double sigma2 = 1.0;
  SelectionState state = full_selection(steering);
  for (int it = 0; it < iterations; ++it) {
    optimize_precoders(steering, state, sigma2);
    const double next = noise_variance_for_snr(steering, state, snr_db);
    const bool done = std::abs(next - sigma2) <= 1e-9 * sigma2;
    sigma2 = next;
    if (done) break;
  }
  return sigma2;
}

double calibrate_noise_variance_selected(const PairGrid<CMatrix>& steering, int budget,
                                         double snr_db, int iterations) {
  double sigma2 = calibrate_noise_variance(steering, snr_db);
  for (int it = 0; it < iterations; ++it) {
    const SelectionState state = select_dominating_paths(steering, budget, sigma2);
    const double next = noise_variance_for_snr(steering, state, snr_db);
    const bool done = std::abs(next - sigma2) <= 1e-9 * sigma2;
    sigma2 = next;
    if (done) break;
  }
  return sigma2;
}

}  // namespace pgi
