// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "pgi/aod_estimation.hpp"
#include "pgi/core_model.hpp"
#include "test_support.hpp"

using namespace pgi;
using pgi::test::deg;

TEST_CASE("angle grid is symmetric and open at the endpoints") {
  const std::vector<double> g = angle_grid(0.1);
  REQUIRE(g.size() > 1000);
  CHECK(g.front() > -std::numbers::pi / 2);
  CHECK(g.back() < std::numbers::pi / 2);
  CHECK(g.front() == doctest::Approx(-g.back()));
  for (size_t i = 1; i < g.size(); ++i) CHECK(g[i] - g[i - 1] == doctest::Approx(deg(0.1)));
  CHECK(std::any_of(g.begin(), g.end(), [](double x) { return std::abs(x) < 1e-12; }));
}

TEST_CASE("sample covariance is Hermitian and averages outer products") {
  Rng rng(3);
  std::vector<CVector> snaps;
  CMatrix expect = CMatrix::Zero(5, 5);
  for (int i = 0; i < 10; ++i) {
    snaps.push_back(complex_normal_vector(rng, 5));
    expect += snaps.back() * snaps.back().adjoint();
  }
  expect /= 10.0;
  const CovarianceEstimate c = sample_covariance(snaps);
  CHECK(c.snapshot_count == 10);
  CHECK((c.matrix - expect).norm() < 1e-12);
  CHECK((c.matrix - c.matrix.adjoint()).norm() == 0.0);
  CHECK_THROWS(sample_covariance({}));
}

TEST_CASE("noiseless MUSIC recovers two known angles") {
  Rng rng(5);
  RVector truth(2);
  truth << deg(-20), deg(35);
  const CMatrix a = steering_matrix(truth, 8, 0.5);
  const CovarianceEstimate cov = sample_covariance(uplink_snapshots(a, 64, 0.0, rng));
  const MusicSpectrum sp = music_spectrum(cov, 2, angle_grid(0.1));
  const AodEstimate est = estimate_aods(sp, 2);
  REQUIRE(est.angles.size() == 2);
  CHECK_FALSE(est.shortfall);
  for (int i = 0; i < 2; ++i) CHECK(std::abs(est.angles[i] - truth(i)) <= deg(0.2));
}

TEST_CASE("MUSIC on random well-separated angles with mild noise") {
  Rng rng(19);
  int hits = 0, total = 0;
  for (int t = 0; t < 30; ++t) {
    const int P = test::uniform_int(rng, 1, 3);
    std::vector<double> th;
    while (static_cast<int>(th.size()) < P) {
      const double c = test::uniform_real(rng, deg(-60), deg(60));
      if (std::all_of(th.begin(), th.end(), [&](double x) { return std::abs(x - c) > deg(20); })) th.push_back(c);
    }
    std::sort(th.begin(), th.end());
    const CMatrix a = steering_matrix(Eigen::Map<RVector>(th.data(), P), 8, 0.5);
    const CovarianceEstimate cov = sample_covariance(uplink_snapshots(a, 200, 1e-3, rng));
    const AodEstimate est = estimate_aods(music_spectrum(cov, P, angle_grid(0.1)), P);
    REQUIRE(static_cast<int>(est.angles.size()) == P);
    for (int i = 0; i < P; ++i, ++total) hits += std::abs(est.angles[i] - th[i]) <= deg(0.5);
  }
  CHECK(hits == total);
}

TEST_CASE("estimate returns ascending angles and reports a shortfall") {
  MusicSpectrum sp;
  sp.grid = {0.0, 0.1, 0.2, 0.3, 0.4};
  sp.values = {1.0, 3.0, 1.0, 2.0, 1.0};
  sp.signal_dim = 1;
  const AodEstimate two = estimate_aods(sp, 2);
  REQUIRE(two.angles.size() == 2);
  CHECK_FALSE(two.shortfall);
  CHECK(two.angles[0] < two.angles[1]);
  CHECK(std::abs(two.angles[0] - 0.1) <= 0.05);
  CHECK(std::abs(two.angles[1] - 0.3) <= 0.05);
  const AodEstimate one = estimate_aods(sp, 1);
  REQUIRE(one.angles.size() == 1);
  CHECK(std::abs(one.angles[0] - 0.1) < 1e-12);  // symmetric neighbours: no parabolic shift
  const AodEstimate three = estimate_aods(sp, 3);
  CHECK(three.shortfall);
  CHECK(three.angles.size() == 2);
}

TEST_CASE("parabolic refinement moves toward the larger neighbour within half a step") {
  MusicSpectrum sp;
  sp.grid = {0.0, 1.0, 2.0};
  sp.values = {1.0, 4.0, 3.0};
  const AodEstimate e = estimate_aods(sp, 1);
  REQUIRE(e.angles.size() == 1);
  // vertex of the parabola through (0,1),(1,4),(2,3): offset 0.5*(1-3)/(1-8+3) = 0.25
  CHECK(e.angles[0] == doctest::Approx(1.25));
}

TEST_CASE("spectrum values are positive and finite") {
  Rng rng(2);
  RVector th(1);
  th << deg(10);
  const CMatrix a = steering_matrix(th, 4, 0.5);
  const MusicSpectrum sp = music_spectrum(sample_covariance(uplink_snapshots(a, 16, 0.0, rng)), 1, angle_grid(1.0));
  for (double v : sp.values) {
    CHECK(std::isfinite(v));
    CHECK(v > 0);
  }
  CHECK_THROWS(music_spectrum(sample_covariance(uplink_snapshots(a, 16, 0.0, rng)), 4, angle_grid(1.0)));
}
