#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hingecb/model.hpp"
#include "hingecb/records.hpp"
#include "hingecb/rng.hpp"
#include "hingecb/surrogate.hpp"

namespace hingecb {

// Rounds 1-indexed; epoch m covers rounds [2^m, 2^(m+1) - 1].
inline int epoch_of_round(long long round) {
  if (round < 1) throw std::domain_error("epoch_of_round: rounds are 1-indexed");
  return std::bit_width(static_cast<unsigned long long>(round)) - 1;
}

inline bool is_epoch_start(long long round) {
  return round >= 1 && (round & (round - 1)) == 0;
}

// Inverse-propensity estimate: loss(a)/p(a) at the played coordinate, zero
// elsewhere. Zero propensity at the played action is unrecoverable.
inline LossVector importance_weight(double observed_loss, int action,
                                    const ActionDistribution& propensities) {
  if (action < 0 || action >= propensities.num_actions())
    throw std::invalid_argument("importance_weight: action out of range");
  if (!(observed_loss >= 0.0) || !std::isfinite(observed_loss))
    throw std::invalid_argument("importance_weight: observed loss must be finite and >= 0");
  double p = propensities[static_cast<std::size_t>(action)];
  if (!(p > 0.0))
    throw std::invalid_argument("importance_weight: played action has zero propensity");
  LossVector est(static_cast<std::size_t>(propensities.num_actions()), 0.0);
  est[static_cast<std::size_t>(action)] = observed_loss / p;
  return est;
}

struct WeightedSample {
  Context x;
  LossVector loss;  // typically one-sparse importance-weighted estimates
};

struct ErmOptions {
  int steps = 2000;
  // c in the c/sqrt(k) schedule; <= 0 picks R / |subgradient at the origin|
  double step_scale = 0.0;
};

inline double erm_objective(const ModelSpec& spec, MarginParam gamma,
                            const std::vector<WeightedSample>& samples,
                            const ParamVector& theta) {
  double total = 0.0;
  for (const WeightedSample& s : samples)
    total += round_hinge_value(spec, theta, s.x, s.loss, gamma);
  return total;
}

// Projected subgradient descent on theta -> sum_i <loss_i, psi^gamma(f(x_i; theta))>
// from the origin, c/sqrt(k) steps, returning the averaged iterate. The
// objective trace of the running average can be captured every 10 steps.
// If the schedule somehow ends above the origin's value the origin is
// returned, so the result never loses to the trivial candidate.
inline ParamVector erm_hinge(const ModelSpec& spec, MarginParam gamma,
                             const std::vector<WeightedSample>& samples, const ErmOptions& opt = {},
                             std::vector<double>* trace = nullptr) {
  if (opt.steps < 1) throw std::domain_error("erm_hinge: steps must be >= 1");
  for (const WeightedSample& s : samples) {
    spec.check_context(s.x, "erm_hinge");
    if (static_cast<int>(s.loss.size()) != spec.num_actions)
      throw std::invalid_argument("erm_hinge: loss arity mismatch");
  }
  const std::size_t d = static_cast<std::size_t>(spec.param_dim());
  ParamVector theta(d, 0.0), avg(d, 0.0), grad(d);

  double scale = opt.step_scale;
  if (scale <= 0.0) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (const WeightedSample& s : samples)
      accumulate_hinge_subgradient(spec, theta, s.x, s.loss, gamma, grad);
    double g0 = norm2(grad);
    scale = g0 > 0.0 ? spec.radius / g0 : spec.radius;
  }

  for (int k = 1; k <= opt.steps; ++k) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (const WeightedSample& s : samples)
      accumulate_hinge_subgradient(spec, theta, s.x, s.loss, gamma, grad);
    double step = scale / std::sqrt(static_cast<double>(k));
    for (std::size_t j = 0; j < d; ++j) theta[j] -= step * grad[j];
    project_in_place(spec, theta);
    double w = 1.0 / static_cast<double>(k);
    for (std::size_t j = 0; j < d; ++j) avg[j] += (theta[j] - avg[j]) * w;
    if (trace && k % 10 == 0) trace->push_back(erm_objective(spec, gamma, samples, avg));
  }

  if (erm_objective(spec, gamma, samples, avg) >
      erm_objective(spec, gamma, samples, ParamVector(d, 0.0)))
    return ParamVector(d, 0.0);
  return avg;
}

inline ActionDistribution policy_for_epoch(const ModelSpec& spec, const ParamVector& theta_hat,
                                           const Context& x, MarginParam gamma, double mu) {
  return smooth(induced_policy_hinge(predict(spec, theta_hat, x), gamma), mu);
}

inline double default_smooth_ftl_mu(const ModelSpec& spec, long long horizon) {
  return 1.0 / (static_cast<double>(spec.num_actions) *
                std::cbrt(static_cast<double>(horizon)));
}

struct SmoothFtlConfig {
  MarginParam gamma;
  double mu;
  ErmOptions erm;

  static SmoothFtlConfig defaults(const ModelSpec& spec, long long horizon, MarginParam gamma) {
    return SmoothFtlConfig{gamma, default_smooth_ftl_mu(spec, horizon), ErmOptions{}};
  }

  void validate(const ModelSpec& spec) const {
    if (!(mu > 0.0) || !(mu <= 1.0 / static_cast<double>(spec.num_actions)))
      throw std::domain_error("SmoothFtlConfig: mu must lie in (0, 1/K]");
    if (erm.steps < 1) throw std::domain_error("SmoothFtlConfig: erm steps must be >= 1");
  }
};

// Follow-the-leader on doubling epochs: at the start of epoch m the hinge ERM
// is refit on exactly the previous epoch's importance-weighted samples, and
// the resulting policy (smoothed by mu) is played for the whole epoch.
class SmoothFtlLearner {
 public:
  // Audit record for one refit: which rounds the fit consumed.
  struct ErmCall {
    long long fit_round;  // the round whose start triggered the refit
    int epoch;            // epoch being entered
    long long first_round, last_round;  // closed range of consumed rounds
    std::size_t sample_count;
  };

  struct Play {
    int action;
    ActionDistribution distribution;
  };

  SmoothFtlLearner(const ModelSpec& spec, const SmoothFtlConfig& cfg)
      : spec_(spec), cfg_(cfg), theta_hat_(static_cast<std::size_t>(spec.param_dim()), 0.0) {
    cfg_.validate(spec_);
  }

  long long round_index() const { return round_; }
  const ParamVector& theta_hat() const { return theta_hat_; }
  const std::vector<ErmCall>& erm_calls() const { return erm_calls_; }

  Play begin_round(const Context& x, Rng& rng) {
    spec_.check_context(x, "SmoothFtlLearner::begin_round");
    if (pending_) throw std::logic_error("begin_round: previous round not finalized");
    long long t = round_ + 1;
    if (t > 1 && is_epoch_start(t)) refit(t);
    ActionDistribution dist =
        t == 1 ? ActionDistribution::uniform(spec_.num_actions)
               : policy_for_epoch(spec_, theta_hat_, x, cfg_.gamma, cfg_.mu);
    int action = rng.categorical(dist.probs());
    pending_x_ = x;
    pending_ = true;
    return Play{action, std::move(dist)};
  }

  void observe(const Play& play, double observed_loss) {
    if (!pending_) throw std::logic_error("observe: no round in flight");
    if (!std::isfinite(observed_loss) || observed_loss < -1e-9 || observed_loss > 1.0 + 1e-9)
      throw std::invalid_argument("observe: loss outside [0, 1]");
    observed_loss = std::min(std::max(observed_loss, 0.0), 1.0);
    history_.push_back(
        WeightedSample{pending_x_, importance_weight(observed_loss, play.action,
                                                     play.distribution)});
    pending_ = false;
    ++round_;
  }

 private:
  void refit(long long t) {
    // entering epoch m at round t = 2^m: consume rounds [2^(m-1), 2^m - 1]
    long long first = t / 2, last = t - 1;
    std::vector<WeightedSample> window(history_.begin() + (first - 1),
                                       history_.begin() + last);
    theta_hat_ = erm_hinge(spec_, cfg_.gamma, window, cfg_.erm);
    erm_calls_.push_back(ErmCall{t, epoch_of_round(t), first, last, window.size()});
  }

  ModelSpec spec_;
  SmoothFtlConfig cfg_;
  ParamVector theta_hat_;
  std::vector<WeightedSample> history_;
  std::vector<ErmCall> erm_calls_;
  long long round_ = 0;
  bool pending_ = false;
  Context pending_x_;
};

template <class EnvFn>
RunLog run_smooth_ftl(const ModelSpec& spec, const SmoothFtlConfig& cfg, long long horizon,
                      EnvFn&& env, Rng& rng) {
  SmoothFtlLearner learner(spec, cfg);
  RunLog log;
  log.records.reserve(static_cast<std::size_t>(horizon));
  log.env_rounds.reserve(static_cast<std::size_t>(horizon));
  double cumulative = 0.0;
  for (long long t = 1; t <= horizon; ++t) {
    RoundSample round = env(t, rng);
    SmoothFtlLearner::Play play = learner.begin_round(round.x, rng);
    double loss = round.loss[static_cast<std::size_t>(play.action)];
    learner.observe(play, loss);
    cumulative += loss;
    RoundRecord rec;
    rec.round = t;
    rec.action = play.action;
    rec.propensity = play.distribution[static_cast<std::size_t>(play.action)];
    rec.observed_loss = loss;
    rec.estimate = std::min(std::max(loss, 0.0), 1.0) /
                   play.distribution[static_cast<std::size_t>(play.action)];
    rec.resample_count = 0;
    rec.cumulative_loss = cumulative;
    log.records.push_back(rec);
    log.env_rounds.push_back(std::move(round));
  }
  return log;
}

}  // namespace hingecb
