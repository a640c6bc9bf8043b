#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "hingecb/oracles.hpp"
#include "hingecb/rng.hpp"
#include "hingecb/smooth_ftl.hpp"

using namespace hingecb;

TEST_CASE("epoch layout") {
  CHECK(epoch_of_round(1) == 0);
  CHECK(epoch_of_round(2) == 1);
  CHECK(epoch_of_round(3) == 1);
  CHECK(epoch_of_round(4) == 2);
  CHECK(epoch_of_round(7) == 2);
  CHECK(epoch_of_round(8) == 3);
  CHECK(epoch_of_round(1023) == 9);
  CHECK(epoch_of_round(1024) == 10);
  CHECK_THROWS_AS(epoch_of_round(0), std::domain_error);

  CHECK(is_epoch_start(1));
  CHECK(is_epoch_start(2));
  CHECK_FALSE(is_epoch_start(3));
  CHECK(is_epoch_start(4));
  CHECK_FALSE(is_epoch_start(6));
  CHECK(is_epoch_start(64));
  CHECK_FALSE(is_epoch_start(0));
}

TEST_CASE("importance weighting") {
  ActionDistribution p(std::vector<double>{0.5, 0.5});
  LossVector est = importance_weight(0.2, 0, p);
  CHECK(est[0] == 0.4);
  CHECK(est[1] == 0.0);

  ActionDistribution q(std::vector<double>{0.25, 0.75});
  est = importance_weight(0.9, 1, q);
  CHECK(est[1] == Catch::Approx(1.2).margin(1e-15));

  CHECK_THROWS_AS(importance_weight(0.2, 2, p), std::invalid_argument);
  CHECK_THROWS_AS(importance_weight(-0.1, 0, p), std::invalid_argument);
  ActionDistribution point(std::vector<double>{1.0, 0.0});
  CHECK_THROWS_AS(importance_weight(0.2, 1, point), std::invalid_argument);
}

TEST_CASE("importance weighting is unbiased under exact enumeration") {
  Rng rng(2026);
  for (int trial = 0; trial < 1000; ++trial) {
    int k = 2 + static_cast<int>(rng.uniform01() * 4.0);
    std::vector<double> w(static_cast<std::size_t>(k));
    for (double& v : w) v = 0.05 + rng.uniform01();
    ActionDistribution p(std::move(w));
    LossVector loss(static_cast<std::size_t>(k));
    for (double& v : loss) v = rng.uniform01();
    // E over the action draw of the one-sparse estimate, coordinatewise
    LossVector expectation(static_cast<std::size_t>(k), 0.0);
    for (int a = 0; a < k; ++a) {
      LossVector est = importance_weight(loss[static_cast<std::size_t>(a)], a, p);
      for (int b = 0; b < k; ++b)
        expectation[static_cast<std::size_t>(b)] +=
            p[static_cast<std::size_t>(a)] * est[static_cast<std::size_t>(b)];
    }
    for (int b = 0; b < k; ++b)
      CHECK(std::fabs(expectation[static_cast<std::size_t>(b)] -
                      loss[static_cast<std::size_t>(b)]) <= 1e-12);
  }
}

TEST_CASE("erm returns the origin on all-zero losses") {
  ModelSpec spec(2, 2, 1.5, 1.0);
  std::vector<WeightedSample> samples{{Context{1.0, 0.0}, LossVector{0.0, 0.0}},
                                      {Context{0.0, 1.0}, LossVector{0.0, 0.0}}};
  ParamVector theta = erm_hinge(spec, MarginParam(0.5), samples);
  for (double v : theta) CHECK(v == 0.0);
}

TEST_CASE("erm objective trace of the averaged iterate is non-increasing") {
  ModelSpec spec(1, 2, 1.0, 1.0);
  std::vector<WeightedSample> samples{{Context{0.9}, LossVector{2.0, 0.0}},
                                      {Context{-0.7}, LossVector{0.0, 1.5}},
                                      {Context{0.4}, LossVector{1.0, 0.0}}};
  ErmOptions opt;
  opt.steps = 500;
  std::vector<double> trace;
  ParamVector theta = erm_hinge(spec, MarginParam(0.5), samples, opt, &trace);
  REQUIRE(trace.size() == 50);
  for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-6);
  // the final point is at least as good as the last trace entry up to the
  // origin fallback, and never worse than the origin
  double final_obj = erm_objective(spec, MarginParam(0.5), samples, theta);
  double origin_obj =
      erm_objective(spec, MarginParam(0.5), samples, ParamVector(2, 0.0));
  CHECK(final_obj <= origin_obj + 1e-12);
}

TEST_CASE("erm agrees with the grid oracle on a d = 4 instance") {
  ModelSpec spec(2, 2, 1.0, 1.0);
  MarginParam gamma(0.5);
  // two equal-loss rounds pin a flat minimum of 2 each; the third is driven
  // to zero hinge on the orthogonal context direction
  std::vector<WeightedSample> samples{{Context{1.0, 0.0}, LossVector{1.0, 1.0}},
                                      {Context{1.0, 0.0}, LossVector{1.0, 1.0}},
                                      {Context{0.0, 1.0}, LossVector{1.0, 0.0}}};
  auto objective = [&](const std::vector<double>& theta) {
    return erm_objective(spec, gamma, samples, theta);
  };
  GridMin grid = grid_erm(4, spec.radius, 41, objective);
  ErmOptions opt;
  opt.steps = 4000;
  ParamVector theta = erm_hinge(spec, gamma, samples, opt);
  double erm_value = erm_objective(spec, gamma, samples, theta);
  CHECK(grid.value == Catch::Approx(4.0).margin(1e-12));
  CHECK(std::fabs(erm_value - grid.value) <= 0.02 * grid.value);
}

TEST_CASE("refits land on epoch starts and consume exactly the previous epoch") {
  ModelSpec spec(1, 2, 1.0, 1.0);
  SmoothFtlConfig cfg = SmoothFtlConfig::defaults(spec, 7, MarginParam(0.5));
  SmoothFtlLearner learner(spec, cfg);
  Rng rng(11);
  for (long long t = 1; t <= 7; ++t) {
    SmoothFtlLearner::Play play = learner.begin_round(Context{t % 2 == 0 ? 0.5 : -0.5}, rng);
    learner.observe(play, t % 3 == 0 ? 1.0 : 0.0);
  }
  const auto& calls = learner.erm_calls();
  REQUIRE(calls.size() == 2);
  CHECK(calls[0].fit_round == 2);
  CHECK(calls[0].epoch == 1);
  CHECK(calls[0].first_round == 1);
  CHECK(calls[0].last_round == 1);
  CHECK(calls[0].sample_count == 1);
  CHECK(calls[1].fit_round == 4);
  CHECK(calls[1].epoch == 2);
  CHECK(calls[1].first_round == 2);
  CHECK(calls[1].last_round == 3);
  CHECK(calls[1].sample_count == 2);

  // one more round crosses into epoch 3 and fits on rounds 4..7
  SmoothFtlLearner::Play play = learner.begin_round(Context{0.5}, rng);
  learner.observe(play, 0.0);
  REQUIRE(learner.erm_calls().size() == 3);
  CHECK(learner.erm_calls()[2].fit_round == 8);
  CHECK(learner.erm_calls()[2].first_round == 4);
  CHECK(learner.erm_calls()[2].last_round == 7);
  CHECK(learner.erm_calls()[2].sample_count == 4);
}

TEST_CASE("horizon one never refits and round one plays uniform") {
  ModelSpec spec(1, 3, 1.0, 1.0);
  SmoothFtlConfig cfg = SmoothFtlConfig::defaults(spec, 1, MarginParam(0.5));
  SmoothFtlLearner learner(spec, cfg);
  Rng rng(5);
  SmoothFtlLearner::Play play = learner.begin_round(Context{0.9}, rng);
  for (int a = 0; a < 3; ++a)
    CHECK(play.distribution[static_cast<std::size_t>(a)] == Catch::Approx(1.0 / 3.0).margin(1e-15));
  learner.observe(play, 0.5);
  CHECK(learner.erm_calls().empty());
}

TEST_CASE("policy at the zero parameter is uniform") {
  ModelSpec spec(2, 4, 1.0, 1.0);
  ParamVector zero(static_cast<std::size_t>(spec.param_dim()), 0.0);
  ActionDistribution dist =
      policy_for_epoch(spec, zero, Context{0.3, -0.4}, MarginParam(0.25), 0.01);
  for (int a = 0; a < 4; ++a)
    CHECK(dist[static_cast<std::size_t>(a)] == Catch::Approx(0.25).margin(1e-15));
}

TEST_CASE("estimates are capped by the smoothing floor") {
  ModelSpec spec(1, 2, 1.0, 1.0);
  SmoothFtlConfig cfg = SmoothFtlConfig::defaults(spec, 64, MarginParam(0.5));
  auto env = [](long long t, Rng& r) {
    Context x{t % 2 == 0 ? 0.9 : -0.9};
    LossVector loss{r.bernoulli(0.8) ? 1.0 : 0.0, r.bernoulli(0.2) ? 1.0 : 0.0};
    return RoundSample{x, loss, {}};
  };
  Rng rng(21);
  RunLog log = run_smooth_ftl(spec, cfg, 64, env, rng);
  REQUIRE(log.records.size() == 64);
  double cap = 1.0 / cfg.mu;
  double cum = 0.0;
  for (const RoundRecord& rec : log.records) {
    CHECK(rec.propensity >= cfg.mu - 1e-12);
    CHECK(rec.estimate <= cap + 1e-9);
    CHECK(rec.estimate ==
          Catch::Approx(rec.observed_loss / rec.propensity).margin(1e-12));
    CHECK(rec.resample_count == 0);
    cum += rec.observed_loss;
    CHECK(rec.cumulative_loss == Catch::Approx(cum).margin(1e-12));
  }
}

TEST_CASE("runs are seed deterministic") {
  ModelSpec spec(1, 2, 1.0, 1.0);
  SmoothFtlConfig cfg = SmoothFtlConfig::defaults(spec, 32, MarginParam(0.5));
  auto env = [](long long t, Rng& r) {
    Context x{t % 2 == 0 ? 0.7 : -0.7};
    LossVector loss{r.bernoulli(0.6) ? 1.0 : 0.0, r.bernoulli(0.4) ? 1.0 : 0.0};
    return RoundSample{x, loss, {}};
  };
  Rng r1(99), r2(99), r3(100);
  RunLog a = run_smooth_ftl(spec, cfg, 32, env, r1);
  RunLog b = run_smooth_ftl(spec, cfg, 32, env, r2);
  RunLog c = run_smooth_ftl(spec, cfg, 32, env, r3);
  bool identical = true, differs = false;
  for (std::size_t i = 0; i < 32; ++i) {
    identical = identical && a.records[i].action == b.records[i].action &&
                a.records[i].propensity == b.records[i].propensity &&
                a.records[i].estimate == b.records[i].estimate;
    differs = differs || a.records[i].action != c.records[i].action;
  }
  CHECK(identical);
  CHECK(differs);
}

TEST_CASE("protocol enforcement and defaults") {
  ModelSpec spec(1, 2, 1.0, 1.0);
  CHECK(default_smooth_ftl_mu(spec, 1000) == 1.0 / (2.0 * std::cbrt(1000.0)));
  SmoothFtlConfig cfg = SmoothFtlConfig::defaults(spec, 8, MarginParam(0.5));
  SmoothFtlLearner learner(spec, cfg);
  Rng rng(3);
  SmoothFtlLearner::Play play = learner.begin_round(Context{0.5}, rng);
  CHECK_THROWS_AS(learner.begin_round(Context{0.5}, rng), std::logic_error);
  learner.observe(play, 0.0);
  CHECK_THROWS_AS(learner.observe(play, 0.0), std::logic_error);

  cfg.mu = 0.0;
  CHECK_THROWS_AS(SmoothFtlLearner(spec, cfg), std::domain_error);
  cfg.mu = 0.75;  // above 1/K
  CHECK_THROWS_AS(SmoothFtlLearner(spec, cfg), std::domain_error);
}
