#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hingecb/errors.hpp"
#include "hingecb/model.hpp"
#include "hingecb/oracles.hpp"
#include "hingecb/records.hpp"
#include "hingecb/rng.hpp"
#include "hingecb/smooth_ftl.hpp"

namespace hingecb {

// Margin-separated stochastic contextual bandit. Contexts are uniform on the
// sphere of radius X_max, rejection-sampled until the score gap at theta_star
// clears margin_floor. The best action gets mean loss label_noise, every other
// action 1 - label_noise; realized losses are independent Bernoulli draws.
class StochasticEnv {
 public:
  StochasticEnv(const ModelSpec& spec, ParamVector theta_star, double margin_floor,
                double label_noise)
      : spec_(spec),
        theta_star_(std::move(theta_star)),
        margin_floor_(margin_floor),
        label_noise_(label_noise) {
    spec_.check_theta(theta_star_, "StochasticEnv");
    if (norm2(theta_star_) > spec_.radius + 1e-9)
      throw ConfigError("StochasticEnv: theta_star outside the parameter ball");
    if (!(margin_floor >= 0.0) || !std::isfinite(margin_floor))
      throw ConfigError("StochasticEnv: margin_floor must be finite and >= 0");
    if (!(label_noise >= 0.0) || !(label_noise < 0.5))
      throw ConfigError("StochasticEnv: label_noise must lie in [0, 0.5)");
  }

  const ModelSpec& spec() const { return spec_; }
  const ParamVector& theta_star() const { return theta_star_; }
  double label_noise() const { return label_noise_; }
  double margin_floor() const { return margin_floor_; }

  RoundSample sample_round(Rng& rng) const {
    const int k = spec_.num_actions;
    for (int attempt = 0; attempt < 10000; ++attempt) {
      Context x = sphere_point(rng);
      ScoreVector s = predict(spec_, theta_star_, x);
      int star = 0;
      for (int a = 1; a < k; ++a)
        if (s[static_cast<std::size_t>(a)] > s[static_cast<std::size_t>(star)]) star = a;
      double runner_up = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < k; ++a)
        if (a != star) runner_up = std::max(runner_up, s[static_cast<std::size_t>(a)]);
      if (s[static_cast<std::size_t>(star)] - runner_up < margin_floor_) continue;

      LossVector mean(static_cast<std::size_t>(k), 1.0 - label_noise_);
      mean[static_cast<std::size_t>(star)] = label_noise_;
      LossVector loss(static_cast<std::size_t>(k));
      for (int a = 0; a < k; ++a)
        loss[static_cast<std::size_t>(a)] =
            rng.bernoulli(mean[static_cast<std::size_t>(a)]) ? 1.0 : 0.0;
      return RoundSample{std::move(x), std::move(loss), std::move(mean)};
    }
    throw ConfigError(
        "StochasticEnv: margin_floor rejected 10^4 consecutive contexts; lower it or rescale "
        "theta_star");
  }

 private:
  Context sphere_point(Rng& rng) const {
    Context x(static_cast<std::size_t>(spec_.context_dim));
    double n2 = 0.0;
    do {
      n2 = 0.0;
      for (double& v : x) {
        v = rng.gaussian();
        n2 += v * v;
      }
    } while (n2 == 0.0);
    double scale = spec_.context_bound / std::sqrt(n2);
    for (double& v : x) v *= scale;
    return x;
  }

  ModelSpec spec_;
  ParamVector theta_star_;
  double margin_floor_;
  double label_noise_;
};

// Deterministic replay of a fixed round list; the rng is accepted and ignored
// so the two environments are interchangeable in run loops.
class ScriptedEnv {
 public:
  explicit ScriptedEnv(std::vector<RoundSample> rounds) : rounds_(std::move(rounds)) {
    if (rounds_.empty()) throw ConfigError("ScriptedEnv: empty script");
  }

  long long size() const { return static_cast<long long>(rounds_.size()); }

  const RoundSample& round(long long t) const {  // 1-indexed
    if (t < 1 || t > size()) throw std::out_of_range("ScriptedEnv: round out of range");
    return rounds_[static_cast<std::size_t>(t - 1)];
  }

  RoundSample sample_round(long long t, Rng&) const { return round(t); }

 private:
  std::vector<RoundSample> rounds_;
};

struct BenchmarkReport {
  ParamVector theta;
  double surrogate_total;    // sum_t <loss_t, psi^gamma(f(x_t; theta))>
  double best_action_total;  // sum_t min_a mean_loss_t(a); NaN when means are unknown
};

// Best fixed parameter in hindsight for the cumulative hinge surrogate on the
// realized (full) loss vectors. Exact lattice search when the parameter space
// is small enough, subgradient ERM otherwise.
inline BenchmarkReport best_fixed_surrogate(const ModelSpec& spec, MarginParam gamma,
                                            const std::vector<RoundSample>& rounds,
                                            const ErmOptions& erm = {}) {
  if (rounds.empty()) throw std::invalid_argument("best_fixed_surrogate: no rounds");
  std::vector<WeightedSample> samples;
  samples.reserve(rounds.size());
  for (const RoundSample& r : rounds) samples.push_back(WeightedSample{r.x, r.loss});

  ParamVector theta;
  if (spec.param_dim() <= 4) {
    int resolution = spec.param_dim() <= 2 ? 201 : 55;
    GridMin gm = grid_erm(spec.param_dim(), spec.radius, resolution,
                          [&](const ParamVector& th) {
                            return erm_objective(spec, gamma, samples, th);
                          });
    theta = gm.theta;
  } else {
    theta = erm_hinge(spec, gamma, samples, erm);
  }

  double best_action = 0.0;
  bool have_means = true;
  for (const RoundSample& r : rounds) {
    if (r.mean_loss.empty()) {
      have_means = false;
      break;
    }
    double m = r.mean_loss[0];
    for (double v : r.mean_loss) m = std::min(m, v);
    best_action += m;
  }
  return BenchmarkReport{theta, erm_objective(spec, gamma, samples, theta),
                         have_means ? best_action : std::numeric_limits<double>::quiet_NaN()};
}

// Cumulative hinge surrogate of a fixed comparator over a round prefix.
inline double fixed_theta_surrogate(const ModelSpec& spec, MarginParam gamma,
                                    const std::vector<RoundSample>& rounds,
                                    const ParamVector& theta, std::size_t prefix) {
  if (prefix > rounds.size())
    throw std::invalid_argument("fixed_theta_surrogate: prefix exceeds the log");
  double total = 0.0;
  for (std::size_t t = 0; t < prefix; ++t)
    total += round_hinge_value(spec, theta, rounds[t].x, rounds[t].loss, gamma);
  return total;
}

}  // namespace hingecb
