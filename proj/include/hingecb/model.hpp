#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "hingecb/surrogate.hpp"

namespace hingecb {

using ParamVector = std::vector<double>;
using Context = std::vector<double>;

// Block-linear score class: theta is K contiguous blocks of size context_dim,
// f(x; theta)_a = <theta_a, x> - mean_b <theta_b, x>, which lands on the
// sum-to-zero subspace by construction.
//
// R >= 1 keeps the unit ball inside the parameter set, so the score class is
// rich enough for the margin constructions used downstream.
struct ModelSpec {
  int context_dim;      // d'
  int num_actions;      // K
  double radius;        // R, parameter ball
  double context_bound; // X_max, max Euclidean norm of contexts

  ModelSpec(int d_ctx, int k, double r, double x_max)
      : context_dim(d_ctx), num_actions(k), radius(r), context_bound(x_max) {
    if (d_ctx < 1) throw std::domain_error("ModelSpec: context_dim must be >= 1");
    if (k < 2) throw std::domain_error("ModelSpec: num_actions must be >= 2");
    if (!(r >= 1.0) || !std::isfinite(r)) throw std::domain_error("ModelSpec: radius must be >= 1");
    if (!(x_max > 0.0) || !std::isfinite(x_max))
      throw std::domain_error("ModelSpec: context_bound must be > 0");
  }

  int param_dim() const { return context_dim * num_actions; }

  // Lipschitz constant of theta -> f(x; theta)_a over the context ball:
  // the centered block gradient has norm at most 2 * X_max.
  double lipschitz() const { return 2.0 * context_bound; }

  // Bound on |f(x; theta)_a| over the parameter ball and context ball.
  double score_bound() const { return 2.0 * radius * context_bound; }

  void check_theta(const ParamVector& theta, const char* op) const {
    if (static_cast<int>(theta.size()) != param_dim())
      throw std::invalid_argument(std::string(op) + ": theta has wrong dimension");
  }
  void check_context(const Context& x, const char* op) const {
    if (static_cast<int>(x.size()) != context_dim)
      throw std::invalid_argument(std::string(op) + ": context has wrong dimension");
  }
};

inline double dot(const double* a, const double* b, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const ParamVector& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Raw per-block inner products, before centering.
inline std::vector<double> block_scores(const ModelSpec& spec, const ParamVector& theta,
                                        const Context& x) {
  spec.check_theta(theta, "block_scores");
  spec.check_context(x, "block_scores");
  std::vector<double> g(static_cast<std::size_t>(spec.num_actions));
  for (int a = 0; a < spec.num_actions; ++a)
    g[static_cast<std::size_t>(a)] =
        dot(theta.data() + static_cast<std::size_t>(a) * spec.context_dim, x.data(), spec.context_dim);
  return g;
}

inline ScoreVector predict(const ModelSpec& spec, const ParamVector& theta, const Context& x) {
  std::vector<double> g = block_scores(spec, theta, x);
  double mean = 0.0;
  for (double v : g) mean += v;
  mean /= static_cast<double>(spec.num_actions);
  for (double& v : g) v -= mean;
  return ScoreVector(std::move(g));
}

// Euclidean projection onto the radius-R ball.
inline ParamVector project(const ModelSpec& spec, ParamVector theta) {
  spec.check_theta(theta, "project");
  double n = norm2(theta);
  if (n > spec.radius) {
    double scale = spec.radius / n;
    for (double& v : theta) v *= scale;
  }
  return theta;
}

inline void project_in_place(const ModelSpec& spec, ParamVector& theta) {
  double n = norm2(theta);
  if (n > spec.radius) {
    double scale = spec.radius / n;
    for (double& v : theta) v *= scale;
  }
}

// Adds scale * (a subgradient of theta -> <loss, psi^gamma(f(x; theta))>) into
// grad. For each action with active hinge the contribution is
// (loss_a / gamma) * (e_a - 1/K) (x) x; zero loss coordinates are skipped, so
// the one-sparse estimates that dominate the hot paths cost O(d) per round.
inline void accumulate_hinge_subgradient(const ModelSpec& spec, const ParamVector& theta,
                                         const Context& x, const LossVector& loss,
                                         MarginParam gamma, ParamVector& grad,
                                         double scale = 1.0) {
  const int k = spec.num_actions;
  const int dc = spec.context_dim;
  if (static_cast<int>(loss.size()) != k)
    throw std::invalid_argument("accumulate_hinge_subgradient: loss arity mismatch");
  if (static_cast<int>(grad.size()) != spec.param_dim())
    throw std::invalid_argument("accumulate_hinge_subgradient: grad has wrong dimension");

  double mean = 0.0;
  std::vector<double> g(static_cast<std::size_t>(k));
  for (int a = 0; a < k; ++a) {
    g[static_cast<std::size_t>(a)] =
        dot(theta.data() + static_cast<std::size_t>(a) * dc, x.data(), dc);
    mean += g[static_cast<std::size_t>(a)];
  }
  mean /= static_cast<double>(k);

  double coeff_sum = 0.0;
  for (int a = 0; a < k; ++a) {
    double la = loss[static_cast<std::size_t>(a)];
    if (la == 0.0) continue;
    double s = g[static_cast<std::size_t>(a)] - mean;
    if (s > -gamma.value) {
      double c = scale * la / gamma.value;
      double* gb = grad.data() + static_cast<std::size_t>(a) * dc;
      for (int i = 0; i < dc; ++i) gb[i] += c * x[static_cast<std::size_t>(i)];
      coeff_sum += c;
    }
  }
  if (coeff_sum != 0.0) {
    double c = coeff_sum / static_cast<double>(k);
    for (int a = 0; a < k; ++a) {
      double* gb = grad.data() + static_cast<std::size_t>(a) * dc;
      for (int i = 0; i < dc; ++i) gb[i] -= c * x[static_cast<std::size_t>(i)];
    }
  }
}

// Standalone subgradient of the single-round surrogate.
inline ParamVector round_subgradient(const ModelSpec& spec, const ParamVector& theta,
                                     const Context& x, const LossVector& loss,
                                     MarginParam gamma) {
  spec.check_theta(theta, "round_subgradient");
  spec.check_context(x, "round_subgradient");
  detail::check_loss_nonnegative(loss, "round_subgradient");
  ParamVector grad(static_cast<std::size_t>(spec.param_dim()), 0.0);
  accumulate_hinge_subgradient(spec, theta, x, loss, gamma, grad);
  return grad;
}

// <loss, psi^gamma(f(x; theta))> without materializing the ScoreVector.
inline double round_hinge_value(const ModelSpec& spec, const ParamVector& theta, const Context& x,
                                const LossVector& loss, MarginParam gamma) {
  const int k = spec.num_actions;
  const int dc = spec.context_dim;
  std::vector<double> g(static_cast<std::size_t>(k));
  double mean = 0.0;
  for (int a = 0; a < k; ++a) {
    g[static_cast<std::size_t>(a)] =
        dot(theta.data() + static_cast<std::size_t>(a) * dc, x.data(), dc);
    mean += g[static_cast<std::size_t>(a)];
  }
  mean /= static_cast<double>(k);
  double total = 0.0;
  for (int a = 0; a < k; ++a) {
    double la = loss[static_cast<std::size_t>(a)];
    if (la == 0.0) continue;
    double s = g[static_cast<std::size_t>(a)] - mean;
    total += la * std::max(1.0 + s / gamma.value, 0.0);
  }
  return total;
}

}  // namespace hingecb
