#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iostream>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "hingecb/model.hpp"
#include "hingecb/rng.hpp"
#include "hingecb/surrogate.hpp"

namespace hingecb {

// One logged interaction feeding the potential.
struct PotentialRound {
  Context x;
  LossVector loss;  // importance-weighted estimate; >= 0, may exceed 1
};

// F(theta) = eta * sum_tau <loss_tau, psi^gamma(f(x_tau; theta))>.
// Exponential-weights density: P(theta) proportional to exp(-F(theta)) on the ball.
// Convex and piecewise linear in theta; immutable while chains run.
class HingePotential {
 public:
  HingePotential(ModelSpec spec, double eta, MarginParam gamma)
      : spec_(spec), eta_(eta), gamma_(gamma) {
    if (!(eta > 0.0) || !std::isfinite(eta))
      throw std::domain_error("HingePotential: eta must be finite and > 0");
  }

  void append(Context x, LossVector loss) {
    spec_.check_context(x, "HingePotential::append");
    if (static_cast<int>(loss.size()) != spec_.num_actions)
      throw std::invalid_argument("HingePotential::append: loss arity mismatch");
    double n1 = 0.0;
    for (double l : loss) {
      if (!(l >= 0.0) || !std::isfinite(l))
        throw std::invalid_argument("HingePotential::append: losses must be finite and >= 0");
      n1 += l;
    }
    max_loss_norm_ = std::max(max_loss_norm_, n1);
    rounds_.push_back(PotentialRound{std::move(x), std::move(loss)});
  }

  int dim() const { return spec_.param_dim(); }
  double radius() const { return spec_.radius; }
  double eta() const { return eta_; }
  MarginParam gamma() const { return gamma_; }
  const ModelSpec& spec() const { return spec_; }
  const std::vector<PotentialRound>& rounds() const { return rounds_; }
  double max_loss_norm() const { return max_loss_norm_; }

  double value(const ParamVector& theta) const {
    double total = 0.0;
    for (const PotentialRound& r : rounds_)
      total += round_hinge_value(spec_, theta, r.x, r.loss, gamma_);
    return eta_ * total;
  }

  // Adds eta * (a subgradient of sum_tau <loss_tau, psi^gamma(f(x_tau; .))>).
  void add_subgradient(const ParamVector& theta, ParamVector& grad) const {
    for (const PotentialRound& r : rounds_)
      accumulate_hinge_subgradient(spec_, theta, r.x, r.loss, gamma_, grad, eta_);
  }

  // eta * T * B_l * L / gamma: divide by the smoothing width u to get the
  // gradient-Lipschitz bound of the smoothed potential.
  double grad_bound_times_u() const {
    return eta_ * static_cast<double>(rounds_.size()) * max_loss_norm_ * spec_.lipschitz() /
           gamma_.value;
  }

 private:
  ModelSpec spec_;
  double eta_;
  MarginParam gamma_;
  std::vector<PotentialRound> rounds_;
  double max_loss_norm_ = 0.0;
};

// F identically zero on a dim-dimensional ball: with the sampler's ridge this
// yields a pure Gaussian target, the ground-truth case for diagnostics.
struct FlatPotential {
  int dimension;
  double ball_radius;

  int dim() const { return dimension; }
  double radius() const { return ball_radius; }
  double value(const ParamVector&) const { return 0.0; }
  void add_subgradient(const ParamVector&, ParamVector&) const {}
};

// Smoothed projected Langevin configuration. steps and smoothing_samples are
// doubles so the theoretical settings (far beyond 2^63) remain representable;
// chains refuse to run configs past run_cap_steps.
struct LmcConfig {
  double smoothing_samples = 8;   // m
  double smoothing_width = 0.05;  // u
  double ridge = 1e-3;            // lambda
  double steps = 400;             // N
  double step_size = 0.01;        // alpha
  bool theoretical_mode = false;

  static constexpr double run_cap_steps = 1e8;

  // Defaults sized for the experiment harness; alpha * N = R^2 so the chain
  // diffuses across the parameter ball once per sample.
  static LmcConfig practical(double radius) {
    LmcConfig cfg;
    cfg.smoothing_samples = 8;
    cfg.smoothing_width = 0.05 * radius;
    cfg.ridge = 1e-3;
    cfg.steps = 400;
    cfg.step_size = radius * radius / cfg.steps;
    cfg.theoretical_mode = false;
    return cfg;
  }

  void validate() const {
    if (!(smoothing_samples >= 1.0)) throw std::domain_error("LmcConfig: smoothing_samples >= 1");
    if (!(smoothing_width >= 0.0)) throw std::domain_error("LmcConfig: smoothing_width >= 0");
    if (!(ridge >= 0.0)) throw std::domain_error("LmcConfig: ridge >= 0");
    if (!(steps >= 1.0)) throw std::domain_error("LmcConfig: steps >= 1");
    if (!(step_size > 0.0)) throw std::domain_error("LmcConfig: step_size > 0");
  }
};

// Analysis-faithful parameters. The step count and smoothing batch are emitted
// with all constants set to 1 and a single max(1, ln(R*L*T*K/gamma)) log
// factor; theoretical_mode marks the result as not meant to be executed.
inline LmcConfig theoretical_params(const ModelSpec& spec, long long horizon, MarginParam gamma,
                                    double eta, double loss_norm_bound) {
  if (horizon < 1) throw std::domain_error("theoretical_params: horizon must be >= 1");
  if (!(eta > 0.0)) throw std::domain_error("theoretical_params: eta must be > 0");
  if (!(loss_norm_bound > 0.0)) throw std::domain_error("theoretical_params: loss bound must be > 0");
  const double T = static_cast<double>(horizon);
  const double R = spec.radius;
  const double L = spec.lipschitz();
  const double K = static_cast<double>(spec.num_actions);
  const double d = static_cast<double>(spec.param_dim());
  const double log_factor = std::max(1.0, std::log(R * L * T * K / gamma.value));

  LmcConfig cfg;
  cfg.smoothing_width =
      1.0 / (std::pow(T, 1.5) * L * loss_norm_bound * R * eta * std::sqrt(d));
  cfg.ridge = 1.0 / (8.0 * std::sqrt(T) * R * R * R);
  cfg.steps = log_factor * (std::pow(R, 18.0) * std::pow(L, 12.0) * std::pow(T, 6.0) *
                                std::pow(d, 12.0) +
                            std::pow(R, 24.0) * std::pow(L, 48.0) * std::pow(d, 12.0) /
                                std::pow(K, 24.0));
  cfg.step_size = R * R / cfg.steps;
  cfg.smoothing_samples = log_factor * std::pow(T, 3.0) * d * std::pow(R, 4.0) * L * L *
                          loss_norm_bound * loss_norm_bound / (K * gamma.value * K * gamma.value);
  cfg.theoretical_mode = true;
  return cfg;
}

// Step size above which the discretized chain is no longer guaranteed to
// contract: alpha must stay below 2 / (grad-Lipschitz bound of the smoothed,
// ridged potential).
inline double contraction_step_bound(const HingePotential& pot, const LmcConfig& cfg) {
  double smooth_grad_lipschitz =
      cfg.smoothing_width > 0.0 ? pot.grad_bound_times_u() / cfg.smoothing_width
                                : std::numeric_limits<double>::infinity();
  double denom = smooth_grad_lipschitz + cfg.ridge;
  if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
  return 2.0 / denom;
}

inline bool step_size_contractive(const HingePotential& pot, const LmcConfig& cfg) {
  return cfg.step_size <= contraction_step_bound(pot, cfg);
}

namespace detail {
inline void warn_step_size_once() {
  static std::once_flag flag;
  std::call_once(flag, [] {
    std::cerr << "[hingecb] lmc: step size exceeds the contraction bound for the current "
                 "potential; samples may mix poorly (warned once per process)\n";
  });
}
}  // namespace detail

// (1/m) sum_i subgrad F(theta + z_i) + lambda * theta, for an explicit
// perturbation batch. Exposed for tests; chains draw their own batches.
template <class Potential>
ParamVector smoothed_regularized_subgrad(const Potential& pot, const ParamVector& theta,
                                         const std::vector<ParamVector>& z_batch, double ridge) {
  if (z_batch.empty()) throw std::invalid_argument("smoothed_regularized_subgrad: empty batch");
  ParamVector grad(theta.size(), 0.0);
  ParamVector shifted(theta.size());
  for (const ParamVector& z : z_batch) {
    if (z.size() != theta.size())
      throw std::invalid_argument("smoothed_regularized_subgrad: batch dimension mismatch");
    for (std::size_t j = 0; j < theta.size(); ++j) shifted[j] = theta[j] + z[j];
    pot.add_subgradient(shifted, grad);
  }
  double inv_m = 1.0 / static_cast<double>(z_batch.size());
  for (std::size_t j = 0; j < theta.size(); ++j) grad[j] = grad[j] * inv_m + ridge * theta[j];
  return grad;
}

// One Langevin chain over a fixed potential. Start at the origin; per step,
// average m fresh-subgradient evaluations at Gaussian perturbations of the
// state, take a half-step of drift plus sqrt(alpha) Gaussian noise, and
// project back onto the ball. All Gaussian draws come off the caller's stream
// in coordinate order, so a seed pins the whole trajectory.
template <class Potential>
class LmcChain {
 public:
  LmcChain(const Potential& pot, const LmcConfig& cfg, Rng& rng)
      : pot_(&pot),
        cfg_(cfg),
        rng_(&rng),
        theta_(static_cast<std::size_t>(pot.dim()), 0.0),
        shifted_(theta_.size()),
        grad_(theta_.size()) {
    cfg_.validate();
    if (cfg_.steps > LmcConfig::run_cap_steps || cfg_.smoothing_samples > LmcConfig::run_cap_steps)
      throw std::domain_error(
          "LmcChain: config is theoretical-scale; refusing to run (see theoretical_mode)");
    m_ = static_cast<int>(cfg_.smoothing_samples);
    if constexpr (requires { pot.grad_bound_times_u(); }) {
      double bound = cfg_.smoothing_width > 0.0
                         ? 2.0 / (pot.grad_bound_times_u() / cfg_.smoothing_width + cfg_.ridge)
                         : (cfg_.ridge > 0.0 ? 2.0 / cfg_.ridge
                                             : std::numeric_limits<double>::infinity());
      if (cfg_.step_size > bound) detail::warn_step_size_once();
    }
  }

  void advance(long long nsteps) {
    for (long long s = 0; s < nsteps; ++s) step();
  }

  long long steps_taken() const { return steps_taken_; }
  const ParamVector& state() const { return theta_; }

 private:
  void step() {
    std::fill(grad_.begin(), grad_.end(), 0.0);
    for (int i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < theta_.size(); ++j)
        shifted_[j] = theta_[j] + cfg_.smoothing_width * rng_->gaussian();
      pot_->add_subgradient(shifted_, grad_);
    }
    const double inv_m = 1.0 / static_cast<double>(m_);
    const double half_alpha = 0.5 * cfg_.step_size;
    const double noise = std::sqrt(cfg_.step_size);
    for (std::size_t j = 0; j < theta_.size(); ++j) {
      double g = grad_[j] * inv_m + cfg_.ridge * theta_[j];
      theta_[j] = theta_[j] - half_alpha * g + noise * rng_->gaussian();
    }
    double n = 0.0;
    for (double v : theta_) n += v * v;
    n = std::sqrt(n);
    if (n > pot_->radius()) {
      double scale = pot_->radius() / n;
      for (double& v : theta_) v *= scale;
    }
    ++steps_taken_;
  }

  const Potential* pot_;
  LmcConfig cfg_;
  Rng* rng_;
  ParamVector theta_;
  ParamVector shifted_;
  ParamVector grad_;
  int m_ = 1;
  long long steps_taken_ = 0;
};

// Fresh chain, N steps, return the terminal state.
template <class Potential>
ParamVector lmc_sample(const Potential& pot, const LmcConfig& cfg, Rng& rng) {
  LmcChain<Potential> chain(pot, cfg, rng);
  chain.advance(static_cast<long long>(cfg.steps));
  return chain.state();
}

}  // namespace hingecb
