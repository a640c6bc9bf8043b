#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hingecb/model.hpp"
#include "hingecb/records.hpp"
#include "hingecb/rng.hpp"
#include "hingecb/sampler.hpp"
#include "hingecb/surrogate.hpp"

namespace hingecb {

// Learning rate sized for the score class: gamma * sqrt(d * logfactor / (5 K^2 B^2 T))
// with the log factor clamped below at 1.
inline double default_hinge_lmc_eta(const ModelSpec& spec, long long horizon, MarginParam gamma) {
  if (horizon < 1) throw std::domain_error("default_hinge_lmc_eta: horizon must be >= 1");
  const double T = static_cast<double>(horizon);
  const double K = static_cast<double>(spec.num_actions);
  const double B = spec.score_bound();
  const double d = static_cast<double>(spec.param_dim());
  const double log_factor =
      std::max(1.0, std::log(spec.radius * spec.lipschitz() * T * K / gamma.value));
  return gamma.value * std::sqrt(d * log_factor / (5.0 * K * K * B * B * T));
}

inline double default_hinge_lmc_mu(const ModelSpec& spec, long long horizon) {
  return 1.0 / (static_cast<double>(spec.num_actions) * std::sqrt(static_cast<double>(horizon)));
}

inline long long default_resample_cap(long long horizon) {
  return static_cast<long long>(std::ceil(std::sqrt(static_cast<double>(horizon))));
}

struct HingeLmcConfig {
  double eta;
  MarginParam gamma;
  double mu;
  long long resample_cap;  // M
  LmcConfig lmc;
  // fast: thinned draws off one continued chain per round; faithful: a fresh
  // full chain per resampling trial, as analyzed
  bool faithful_resampling = false;

  static HingeLmcConfig defaults(const ModelSpec& spec, long long horizon, MarginParam gamma) {
    HingeLmcConfig cfg{default_hinge_lmc_eta(spec, horizon, gamma), gamma,
                       default_hinge_lmc_mu(spec, horizon), default_resample_cap(horizon),
                       LmcConfig::practical(spec.radius), false};
    return cfg;
  }

  void validate(const ModelSpec& spec) const {
    if (!(eta > 0.0)) throw std::domain_error("HingeLmcConfig: eta must be > 0");
    if (!(mu >= 0.0) || !(mu <= 1.0 / static_cast<double>(spec.num_actions)))
      throw std::domain_error("HingeLmcConfig: mu must lie in [0, 1/K]");
    if (resample_cap < 1) throw std::domain_error("HingeLmcConfig: resample_cap must be >= 1");
    lmc.validate();
  }
};

struct RoundDecision {
  int action = 0;
  ActionDistribution distribution;
  ParamVector theta;
  long long resample_count = 0;
  LossVector loss_estimate;
};

namespace detail {
inline void warn_loss_clamp_once() {
  static std::once_flag flag;
  std::call_once(flag, [] {
    std::cerr << "[hingecb] hinge_lmc: observed loss clamped into [0, 1] "
                 "(drift within 1e-9; warned once per process)\n";
  });
}
}  // namespace detail

// Exponential-weights play over the hinge potential, sampled with LMC, with
// truncated geometric resampling standing in for the inverse propensity.
//
// Per round: sample theta_t from the current potential, play the smoothed
// induced policy, count resampling trials until a fresh theta reproduces the
// played action (cap M), then feed loss * m_t at the played coordinate back
// into the potential.
class HingeLmcLearner {
 public:
  HingeLmcLearner(const ModelSpec& spec, const HingeLmcConfig& cfg)
      : spec_(spec), cfg_(cfg), potential_(spec, cfg.eta, cfg.gamma) {
    cfg_.validate(spec_);
    pool_thin_ = std::max<long long>(
        1, static_cast<long long>(std::ceil(2.0 * cfg_.lmc.steps /
                                            static_cast<double>(cfg_.resample_cap))));
  }

  const HingePotential& potential() const { return potential_; }
  long long round_index() const { return round_; }
  const HingeLmcConfig& config() const { return cfg_; }

  // Draw theta_t, form p_t^mu, draw the action. In fast mode this starts the
  // round's chain; the resampling pool continues it.
  RoundDecision choose_action(const Context& x, Rng& rng) {
    spec_.check_context(x, "HingeLmcLearner::choose_action");
    if (pending_) throw std::logic_error("choose_action: previous round not finalized");
    ParamVector theta;
    if (cfg_.faithful_resampling) {
      theta = lmc_sample(potential_, cfg_.lmc, rng);
    } else {
      chain_.emplace(potential_, cfg_.lmc, rng);
      chain_->advance(static_cast<long long>(cfg_.lmc.steps));
      theta = chain_->state();
      pool_used_ = 0;
    }
    ActionDistribution dist = play_distribution(theta, x);
    int action = rng.categorical(dist.probs());
    pending_ = true;
    return RoundDecision{action, std::move(dist), std::move(theta), 0, LossVector{}};
  }

  // Trials until a freshly sampled theta reproduces `action` at context x,
  // truncated at M. The break-iteration sample is discarded after the match
  // test; in fast mode each trial consumes the next thinned pool draw.
  long long geometric_resample(const Context& x, int action, Rng& rng) {
    spec_.check_context(x, "HingeLmcLearner::geometric_resample");
    check_action(action, "HingeLmcLearner::geometric_resample");
    if (!cfg_.faithful_resampling && !chain_)
      throw std::logic_error("geometric_resample: no active round chain (call choose_action)");
    for (long long m = 1; m < cfg_.resample_cap; ++m) {
      ParamVector theta;
      if (cfg_.faithful_resampling) {
        theta = lmc_sample(potential_, cfg_.lmc, rng);
      } else {
        chain_->advance(pool_thin_);
        ++pool_used_;
        theta = chain_->state();
      }
      ActionDistribution dist = play_distribution(theta, x);
      int trial = rng.categorical(dist.probs());
      if (trial == action) return m;
      if (!cfg_.faithful_resampling && pool_used_ >= cfg_.resample_cap) break;
    }
    return cfg_.resample_cap;
  }

  // Feed back loss * m_t at the played coordinate. The loss must lie in [0, 1]
  // up to 1e-9 of numeric drift, which is clamped with a one-time warning.
  void update(const Context& x, int action, double observed_loss, long long resample_count) {
    spec_.check_context(x, "HingeLmcLearner::update");
    check_action(action, "HingeLmcLearner::update");
    if (resample_count < 1 || resample_count > cfg_.resample_cap)
      throw std::invalid_argument("update: resample_count out of [1, M]");
    if (!std::isfinite(observed_loss) || observed_loss < -1e-9 || observed_loss > 1.0 + 1e-9)
      throw std::invalid_argument("update: observed loss outside [0, 1]");
    if (observed_loss < 0.0 || observed_loss > 1.0) {
      detail::warn_loss_clamp_once();
      observed_loss = std::min(std::max(observed_loss, 0.0), 1.0);
    }
    LossVector estimate(static_cast<std::size_t>(spec_.num_actions), 0.0);
    estimate[static_cast<std::size_t>(action)] =
        observed_loss * static_cast<double>(resample_count);
    chain_.reset();
    potential_.append(x, std::move(estimate));
    pending_ = false;
    ++round_;
  }

  // One full round against a loss callback: action, observed loss, resample,
  // update. Returns the completed decision record.
  template <class LossFn>
  RoundDecision run_round(const Context& x, LossFn&& observe, Rng& rng) {
    RoundDecision d = choose_action(x, rng);
    double loss = observe(d.action);
    d.resample_count = geometric_resample(x, d.action, rng);
    update(x, d.action, loss, d.resample_count);
    d.loss_estimate.assign(static_cast<std::size_t>(spec_.num_actions), 0.0);
    d.loss_estimate[static_cast<std::size_t>(d.action)] =
        std::min(std::max(loss, 0.0), 1.0) * static_cast<double>(d.resample_count);
    return d;
  }

 private:
  ActionDistribution play_distribution(const ParamVector& theta, const Context& x) const {
    return smooth(induced_policy_hinge(predict(spec_, theta, x), cfg_.gamma), cfg_.mu);
  }

  void check_action(int action, const char* op) const {
    if (action < 0 || action >= spec_.num_actions)
      throw std::invalid_argument(std::string(op) + ": action out of range");
  }

  ModelSpec spec_;
  HingeLmcConfig cfg_;
  HingePotential potential_;
  std::optional<LmcChain<HingePotential>> chain_;
  long long pool_thin_ = 1;
  long long pool_used_ = 0;
  long long round_ = 0;
  bool pending_ = false;
};

// Drive a learner for T rounds against an environment callback
// (round index, rng) -> RoundSample.
template <class EnvFn>
RunLog run_hinge_lmc(const ModelSpec& spec, const HingeLmcConfig& cfg, long long horizon,
                     EnvFn&& env, Rng& rng) {
  HingeLmcLearner learner(spec, cfg);
  RunLog log;
  log.records.reserve(static_cast<std::size_t>(horizon));
  log.env_rounds.reserve(static_cast<std::size_t>(horizon));
  double cumulative = 0.0;
  for (long long t = 1; t <= horizon; ++t) {
    RoundSample round = env(t, rng);
    RoundDecision d = learner.run_round(
        round.x, [&](int a) { return round.loss[static_cast<std::size_t>(a)]; }, rng);
    cumulative += round.loss[static_cast<std::size_t>(d.action)];
    RoundRecord rec;
    rec.round = t;
    rec.action = d.action;
    rec.propensity = d.distribution[static_cast<std::size_t>(d.action)];
    rec.observed_loss = round.loss[static_cast<std::size_t>(d.action)];
    rec.estimate = d.loss_estimate[static_cast<std::size_t>(d.action)];
    rec.resample_count = d.resample_count;
    rec.cumulative_loss = cumulative;
    log.records.push_back(rec);
    log.env_rounds.push_back(std::move(round));
  }
  return log;
}

}  // namespace hingecb
