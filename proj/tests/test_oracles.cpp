#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "hingecb/oracles.hpp"
#include "hingecb/rng.hpp"
#include "hingecb/sampler.hpp"
#include "test_instances.hpp"

using namespace hingecb;

TEST_CASE("truncated geometric moments, frozen values") {
  TruncGeomMoments m = truncated_geom_moments(0.5, 3);
  CHECK(m.mean == Catch::Approx(1.75).margin(1e-14));
  CHECK(m.second_moment == Catch::Approx(3.75).margin(1e-14));
  CHECK(m.matched_mass == Catch::Approx(0.875).margin(1e-14));

  TruncGeomMoments sure = truncated_geom_moments(1.0, 7);
  CHECK(sure.mean == 1.0);
  CHECK(sure.second_moment == 1.0);
  CHECK(sure.matched_mass == 1.0);

  TruncGeomMoments one = truncated_geom_moments(0.25, 1);
  CHECK(one.mean == 1.0);
  CHECK(one.second_moment == 1.0);
  CHECK(one.matched_mass == Catch::Approx(0.25).margin(1e-14));
}

TEST_CASE("truncated geometric mean matches the closed form") {
  for (double p : {0.01, 0.05, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0}) {
    for (long long cap : {1LL, 2LL, 10LL, 100LL, 1000LL}) {
      TruncGeomMoments m = truncated_geom_moments(p, cap);
      CHECK(m.mean ==
            Catch::Approx(truncated_geom_mean_closed_form(p, cap)).margin(1e-11));
    }
  }
}

TEST_CASE("truncated second moment never exceeds 2 / p^2") {
  for (int i = 1; i <= 19; ++i) {
    double p = 0.05 * static_cast<double>(i);
    for (long long cap : {10LL, 100LL, 1000LL}) {
      TruncGeomMoments m = truncated_geom_moments(p, cap);
      CHECK(m.second_moment <= 2.0 / (p * p) + 1e-9);
    }
  }
}

TEST_CASE("grid erm: constant objective resolves ties lexicographically") {
  // axis {-1, 0, 1}; the first feasible lattice point in row-major order is
  // (-1, 0) because (-1, -1) falls outside the unit ball
  GridMin gm = grid_erm(2, 1.0, 3, [](const std::vector<double>&) { return 7.0; });
  CHECK(gm.value == 7.0);
  CHECK(gm.theta == std::vector<double>{-1.0, 0.0});
}

TEST_CASE("grid erm: separable quadratic snaps to the nearest lattice point") {
  GridMin gm = grid_erm(1, 2.0, 5, [](const std::vector<double>& t) {
    return (t[0] - 0.8) * (t[0] - 0.8);
  });
  CHECK(gm.theta[0] == 1.0);

  GridMin gm2 = grid_erm(3, 2.0, 41, [](const std::vector<double>& t) {
    double v = 0.0;
    for (double x : t) v += (x - 0.5) * (x - 0.5);
    return v;
  });
  for (double x : gm2.theta) CHECK(x == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("grid erm budget guards") {
  auto zero = [](const std::vector<double>&) { return 0.0; };
  CHECK_THROWS_AS(grid_erm(5, 1.0, 3, zero), OracleBudgetError);
  CHECK_THROWS_AS(grid_erm(4, 1.0, 57, zero), OracleBudgetError);  // 57^4 > 1e7
  CHECK_NOTHROW(grid_erm(4, 1.0, 10, zero));
  CHECK_THROWS_AS(grid_erm(1, 1.0, 1, zero), std::invalid_argument);
}

TEST_CASE("finite differences: exact on linear, tight on quadratic") {
  std::vector<double> theta{0.3, -1.2, 2.0};
  std::vector<double> glin = finite_diff_grad(
      [](const std::vector<double>& t) { return 2.0 * t[0] - 3.0 * t[1] + 0.5 * t[2]; }, theta,
      1e-5);
  CHECK(glin[0] == Catch::Approx(2.0).margin(1e-9));
  CHECK(glin[1] == Catch::Approx(-3.0).margin(1e-9));
  CHECK(glin[2] == Catch::Approx(0.5).margin(1e-9));

  std::vector<double> gq = finite_diff_grad(
      [](const std::vector<double>& t) {
        double v = 0.0;
        for (double x : t) v += x * x;
        return v;
      },
      theta, 1e-5);
  for (std::size_t j = 0; j < theta.size(); ++j)
    CHECK(gq[j] == Catch::Approx(2.0 * theta[j]).margin(1e-8));
}

TEST_CASE("rejection sampler reproduces the truncated standard gaussian") {
  FlatPotential flat = testbed::d2_flat_potential();
  RejectionSampler<FlatPotential> oracle(flat, 1.0);
  Rng rng(101);
  const int n = 100000;
  double mean[2] = {0.0, 0.0};
  double sq[2] = {0.0, 0.0};
  for (int i = 0; i < n; ++i) {
    std::vector<double> s = oracle.sample(rng);
    for (int j = 0; j < 2; ++j) {
      mean[j] += s[static_cast<std::size_t>(j)];
      sq[j] += s[static_cast<std::size_t>(j)] * s[static_cast<std::size_t>(j)];
    }
  }
  for (int j = 0; j < 2; ++j) {
    mean[j] /= n;
    sq[j] = sq[j] / n - mean[j] * mean[j];
    CHECK(std::fabs(mean[j]) <= 3.0 / std::sqrt(static_cast<double>(n)) + 1e-3);
    CHECK(sq[j] == Catch::Approx(1.0).epsilon(0.05));
  }
}

TEST_CASE("rejection sampler with zero exponent is uniform on the ball") {
  FlatPotential flat{2, 2.0};
  RejectionSampler<FlatPotential> oracle(flat, 0.0);
  Rng rng(211);
  const int n = 100000;
  double mean[2] = {0.0, 0.0};
  double sq[2] = {0.0, 0.0};
  for (int i = 0; i < n; ++i) {
    std::vector<double> s = oracle.sample(rng);
    for (int j = 0; j < 2; ++j) {
      mean[j] += s[static_cast<std::size_t>(j)];
      sq[j] += s[static_cast<std::size_t>(j)] * s[static_cast<std::size_t>(j)];
    }
  }
  // uniform disk of radius 2: E[x] = 0, E[x^2] = R^2/4 = 1
  for (int j = 0; j < 2; ++j) {
    mean[j] /= n;
    sq[j] /= n;
    CHECK(std::fabs(mean[j]) <= 0.02);
    CHECK(sq[j] == Catch::Approx(1.0).epsilon(0.03));
  }
}

TEST_CASE("rejection sampler aborts when acceptance collapses") {
  FlatPotential flat{2, 6.0};
  RejectionSampler<FlatPotential> oracle(flat, 1e6);  // essentially a point mass at 0
  Rng rng(307);
  CHECK_THROWS_AS(
      [&] {
        for (int i = 0; i < 50; ++i) oracle.sample(rng);
      }(),
      OracleBudgetError);
}

TEST_CASE("rejection sampler dimension guard") {
  FlatPotential flat{4, 1.0};
  CHECK_THROWS_AS(RejectionSampler<FlatPotential>(flat, 1.0), OracleBudgetError);
}

TEST_CASE("rejection sampler on the canonical hinge potential stays healthy") {
  HingePotential pot = testbed::d2_hinge_potential();
  RejectionSampler<HingePotential> oracle(pot, 1e-3);
  Rng rng(401);
  double wbar = 0.0;
  const int n = 2000;
  for (int i = 0; i < n; ++i) {
    std::vector<double> s = oracle.sample(rng);
    wbar += 0.5 * (s[0] - s[1]);
  }
  wbar /= n;
  // every logged round penalizes positive w, so the posterior mean must sit
  // clearly negative
  CHECK(wbar < -0.2);
  CHECK(oracle.acceptance_rate() > 1e-3);
}
