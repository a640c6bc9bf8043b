#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "hingecb/rng.hpp"
#include "hingecb/surrogate.hpp"

using namespace hingecb;

namespace {

// Random sum-to-zero score vector with coordinates on the scale of `spread`.
std::vector<double> random_centered_scores(Rng& rng, int k, double spread) {
  std::vector<double> s(static_cast<std::size_t>(k));
  double mean = 0.0;
  for (double& v : s) {
    v = rng.uniform(-spread, spread);
    mean += v;
  }
  mean /= static_cast<double>(k);
  for (double& v : s) v -= mean;
  return s;
}

double inner(const std::vector<double>& a, const std::vector<double>& b) {
  double t = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) t += a[i] * b[i];
  return t;
}

}  // namespace

TEST_CASE("margin param validation") {
  CHECK_THROWS_AS(MarginParam(0.0), std::domain_error);
  CHECK_THROWS_AS(MarginParam(-1.0), std::domain_error);
  CHECK(MarginParam(0.25).value == 0.25);
}

TEST_CASE("ramp and hinge pointwise values") {
  MarginParam g(0.5);
  CHECK(ramp(0.0, g) == 1.0);
  CHECK(ramp(-0.5, g) == 0.0);
  CHECK(ramp(-0.25, g) == 0.5);
  CHECK(ramp(3.0, g) == 1.0);
  CHECK(ramp(-2.0, g) == 0.0);
  CHECK(hinge(0.0, g) == 1.0);
  CHECK(hinge(-0.5, g) == 0.0);
  CHECK(hinge(0.5, g) == 2.0);
  CHECK(hinge(-1.0, g) == 0.0);
  CHECK(hinge(1.25, g) == 3.5);
}

TEST_CASE("both surrogates are 1/gamma Lipschitz") {
  Rng rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    double gamma = rng.uniform(0.1, 2.0);
    MarginParam g(gamma);
    double a = rng.uniform(-4.0, 4.0), b = rng.uniform(-4.0, 4.0);
    CHECK(std::fabs(ramp(a, g) - ramp(b, g)) <= std::fabs(a - b) / gamma + 1e-12);
    CHECK(std::fabs(hinge(a, g) - hinge(b, g)) <= std::fabs(a - b) / gamma + 1e-12);
  }
}

TEST_CASE("score vector recentering band") {
  // exact input passes through untouched
  ScoreVector s0(std::vector<double>{1.0, -1.0});
  CHECK(s0[0] == 1.0);
  // drift inside the band is recentered
  ScoreVector s1(std::vector<double>{1.0 + 5e-7, -1.0});
  double sum = s1[0] + s1[1];
  CHECK(std::fabs(sum) <= 1e-9);
  // drift beyond the band is rejected
  CHECK_THROWS_AS(ScoreVector(std::vector<double>{1.0, -1.0 + 2e-6}), std::domain_error);
  // arity and finiteness
  CHECK_THROWS_AS(ScoreVector(std::vector<double>{0.0}), std::domain_error);
  CHECK_THROWS_AS(ScoreVector(std::vector<double>{1.0 / 0.0, 0.0}), std::domain_error);
}

TEST_CASE("induced policies on frozen instances") {
  MarginParam g1(1.0);
  ActionDistribution ph = induced_policy_hinge(ScoreVector({1.0, 0.0, -1.0}), g1);
  CHECK(ph[0] == Catch::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(ph[1] == Catch::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(ph[2] == 0.0);

  MarginParam gh(0.5);
  ActionDistribution pr = induced_policy_ramp(ScoreVector({0.5, -0.25, -0.25}), gh);
  CHECK(pr[0] == Catch::Approx(0.5).epsilon(1e-12));
  CHECK(pr[1] == Catch::Approx(0.25).epsilon(1e-12));
  CHECK(pr[2] == Catch::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("policy normalizers never collapse") {
  Rng rng(17);
  for (int trial = 0; trial < 2000; ++trial) {
    int k = 2 + static_cast<int>(rng.uniform01() * 4.0);
    MarginParam g(rng.uniform(0.1, 2.0));
    ScoreVector s(random_centered_scores(rng, k, 3.0));
    double z_hinge = 0.0, z_ramp = 0.0;
    for (int a = 0; a < k; ++a) {
      z_hinge += hinge(s[static_cast<std::size_t>(a)], g);
      z_ramp += ramp(s[static_cast<std::size_t>(a)], g);
    }
    CHECK(z_hinge >= static_cast<double>(k) - 1e-9);
    CHECK(z_ramp >= 1.0 - 1e-9);
  }
}

TEST_CASE("policy value chains hold on random draws") {
  Rng rng(23);
  for (int trial = 0; trial < 2000; ++trial) {
    int k = 2 + static_cast<int>(rng.uniform01() * 4.0);
    MarginParam g(rng.uniform(0.1, 2.0));
    ScoreVector s(random_centered_scores(rng, k, 2.5));
    LossVector loss(static_cast<std::size_t>(k));
    for (double& l : loss) l = rng.uniform01();

    ActionDistribution ph = induced_policy_hinge(s, g);
    ActionDistribution pr = induced_policy_ramp(s, g);
    double hinge_total = cc_hinge_loss(s, loss, g);
    double ramp_total = cc_ramp_loss(s, loss, g);
    double thresh = margin_loss(s, loss, g);

    CHECK(inner(ph.probs(), loss) <= hinge_total / static_cast<double>(k) + 1e-9);
    CHECK(inner(pr.probs(), loss) <= ramp_total + 1e-9);
    CHECK(ramp_total <= thresh + 1e-9);
    CHECK(ramp_total <= hinge_total + 1e-9);

    // the argmax action is also dominated by the ramp value
    int best = 0;
    for (int a = 1; a < k; ++a)
      if (s[static_cast<std::size_t>(a)] > s[static_cast<std::size_t>(best)]) best = a;
    CHECK(loss[static_cast<std::size_t>(best)] <= ramp_total + 1e-9);
  }
}

TEST_CASE("hinge policy is exact at the realizable score pattern") {
  // s_a = K*gamma*1{a = star} - gamma: the normalizer is exactly K, the policy
  // a point mass, and <loss, psi(s)> = K * loss[star], all without roundoff
  // when gamma is dyadic.
  Rng rng(31);
  for (int k = 2; k <= 6; ++k) {
    for (int rep = 0; rep < 25; ++rep) {
      double gamma = static_cast<double>(1 + static_cast<int>(rng.uniform01() * 2047)) / 1024.0;
      MarginParam g(gamma);
      int star = static_cast<int>(rng.uniform01() * k);
      std::vector<double> s(static_cast<std::size_t>(k), -gamma);
      s[static_cast<std::size_t>(star)] = gamma * static_cast<double>(k - 1);
      LossVector loss(static_cast<std::size_t>(k));
      for (double& l : loss) l = rng.uniform01();

      ScoreVector sv(s);
      CHECK(cc_hinge_loss(sv, loss, g) == static_cast<double>(k) * loss[static_cast<std::size_t>(star)]);
      ActionDistribution p = induced_policy_hinge(sv, g);
      CHECK(p[static_cast<std::size_t>(star)] == 1.0);
      double z = 0.0;
      for (int a = 0; a < k; ++a) z += hinge(sv[static_cast<std::size_t>(a)], g);
      CHECK(z == static_cast<double>(k));
    }
  }
}

TEST_CASE("smoothing") {
  ActionDistribution p({1.0, 0.0});
  ActionDistribution q = smooth(p, 0.5);
  CHECK(q[0] == 0.5);
  CHECK(q[1] == 0.5);

  ActionDistribution r = smooth(ActionDistribution({0.9, 0.1, 0.0}), 0.1);
  CHECK(r[0] == Catch::Approx(0.7 * 0.9 + 0.1).epsilon(1e-12));
  CHECK(r[2] == Catch::Approx(0.1).epsilon(1e-12));

  CHECK_THROWS_AS(smooth(p, -0.01), std::domain_error);
  CHECK_THROWS_AS(smooth(p, 0.51), std::domain_error);
  CHECK_NOTHROW(smooth(p, 0.0));
}

TEST_CASE("cost-sensitive zero forces multiclass zero at margin K*gamma") {
  Rng rng(41);
  MarginParam gtil(1.0);
  for (int trial = 0; trial < 300; ++trial) {
    int k = 2 + static_cast<int>(rng.uniform01() * 3.0);
    double gamma = rng.uniform(0.2, 1.5);
    MarginParam g(gamma);
    int star = static_cast<int>(rng.uniform01() * k);
    // wrong-class scores at or below -gamma make the cost-sensitive loss vanish
    std::vector<double> s(static_cast<std::size_t>(k));
    double others = 0.0;
    for (int y = 0; y < k; ++y) {
      if (y == star) continue;
      s[static_cast<std::size_t>(y)] = -gamma - rng.uniform01();
      others += s[static_cast<std::size_t>(y)];
    }
    s[static_cast<std::size_t>(star)] = -others;
    LossVector loss(static_cast<std::size_t>(k), 1.0);
    loss[static_cast<std::size_t>(star)] = 0.0;

    ScoreVector sv(s);
    REQUIRE(cc_hinge_loss(sv, loss, g) == 0.0);
    CHECK(mc_hinge_loss(sv.values(), star, MarginParam(static_cast<double>(k) * gamma)) == 0.0);
  }
}

TEST_CASE("multiclass zero does not force cost-sensitive zero") {
  // scores (3g, 0, -3g) for the first class: multiclass hinge at margin 3g is
  // zero while the cost-sensitive hinge stays >= 1 at every margin.
  for (double gamma : {0.2, 0.7, 1.3}) {
    std::vector<double> s{3.0 * gamma, 0.0, -3.0 * gamma};
    CHECK(mc_hinge_loss(s, 0, MarginParam(3.0 * gamma)) == 0.0);
    LossVector loss{0.0, 1.0, 1.0};
    for (double gt : {0.1, 1.0, 10.0}) {
      CHECK(cc_hinge_loss(ScoreVector(s), loss, MarginParam(gt)) >= 1.0);
    }
  }
}

TEST_CASE("mc hinge frozen values") {
  std::vector<double> g{2.0, 0.0, -1.0};
  CHECK(mc_hinge_loss(g, 0, MarginParam(1.0)) == 0.0);   // margin 2 >= 1
  CHECK(mc_hinge_loss(g, 1, MarginParam(1.0)) == 3.0);   // margin -2
  CHECK(mc_hinge_loss(g, 2, MarginParam(2.0)) == 2.5);   // margin -3
  CHECK(mc_hinge_loss(g, 0, MarginParam(4.0)) == 0.5);   // margin 2 < 4
  CHECK_THROWS_AS(mc_hinge_loss(g, 3, MarginParam(1.0)), std::invalid_argument);
}

TEST_CASE("centering bridge") {
  ScoreVector s = center_scores({3.0, 0.0, 0.0});
  CHECK(s[0] == Catch::Approx(2.0).epsilon(1e-12));
  CHECK(s[1] == Catch::Approx(-1.0).epsilon(1e-12));
  CHECK(s[2] == Catch::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("loss validation at the boundary") {
  ScoreVector s(std::vector<double>{1.0, -1.0});
  CHECK_THROWS_AS(cc_hinge_loss(s, LossVector{0.5, -0.1}, MarginParam(1.0)), std::invalid_argument);
  CHECK_THROWS_AS(cc_hinge_loss(s, LossVector{0.5}, MarginParam(1.0)), std::invalid_argument);
  CHECK_THROWS_AS(margin_loss(s, LossVector{0.5, 0.5, 0.5}, MarginParam(1.0)),
                  std::invalid_argument);
}
