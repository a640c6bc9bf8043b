#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hingecb {

using LossVector = std::vector<double>;

// Margin width gamma > 0. Both surrogates are (1/gamma)-Lipschitz in the score.
struct MarginParam {
  double value;
  explicit MarginParam(double gamma) : value(gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma))
      throw std::domain_error("MarginParam: gamma must be finite and > 0");
  }
};

// Score vector on the sum-to-zero subspace of R^K. Inputs whose coordinate sum
// drifts by at most 1e-6 are re-centered; anything farther off is rejected.
// After construction the sum is zero to within 1e-9.
class ScoreVector {
 public:
  explicit ScoreVector(std::vector<double> values) : v_(std::move(values)) {
    if (v_.size() < 2) throw std::domain_error("ScoreVector: need at least 2 actions");
    double sum = 0.0;
    for (double x : v_) {
      if (!std::isfinite(x)) throw std::domain_error("ScoreVector: non-finite score");
      sum += x;
    }
    if (std::fabs(sum) > 1e-6)
      throw std::domain_error("ScoreVector: coordinates sum to " + std::to_string(sum) +
                              ", outside the +/-1e-6 re-centering band");
    if (std::fabs(sum) > 1e-9) {
      double mean = sum / static_cast<double>(v_.size());
      for (double& x : v_) x -= mean;
    }
  }

  int num_actions() const { return static_cast<int>(v_.size()); }
  double operator[](std::size_t a) const { return v_[a]; }
  const std::vector<double>& values() const { return v_; }

 private:
  std::vector<double> v_;
};

// Probability vector over K >= 2 actions, renormalized on construction.
class ActionDistribution {
 public:
  explicit ActionDistribution(std::vector<double> weights) : p_(std::move(weights)) {
    if (p_.size() < 2) throw std::domain_error("ActionDistribution: need at least 2 actions");
    double total = 0.0;
    for (double w : p_) {
      if (!(w >= 0.0) || !std::isfinite(w))
        throw std::domain_error("ActionDistribution: weights must be finite and >= 0");
      total += w;
    }
    if (!(total > 0.0)) throw std::domain_error("ActionDistribution: zero total mass");
    for (double& w : p_) w /= total;
  }

  static ActionDistribution uniform(int k) {
    if (k < 2) throw std::domain_error("ActionDistribution: need at least 2 actions");
    return ActionDistribution(std::vector<double>(static_cast<std::size_t>(k), 1.0));
  }

  int num_actions() const { return static_cast<int>(p_.size()); }
  double operator[](std::size_t a) const { return p_[a]; }
  const std::vector<double>& probs() const { return p_; }

 private:
  std::vector<double> p_;
};

// ramp: clipped affine, 0 for s <= -gamma, 1 for s >= 0.
inline double ramp(double s, MarginParam gamma) {
  return std::min(std::max(1.0 + s / gamma.value, 0.0), 1.0);
}

// hinge: the ramp without the upper clip.
inline double hinge(double s, MarginParam gamma) {
  return std::max(1.0 + s / gamma.value, 0.0);
}

// Subgradient convention: active (slope 1/gamma) strictly above the kink.
inline double hinge_subgradient(double s, MarginParam gamma) {
  return s > -gamma.value ? 1.0 / gamma.value : 0.0;
}

namespace detail {
inline void check_same_arity(std::size_t k, const LossVector& loss, const char* op) {
  if (loss.size() != k)
    throw std::invalid_argument(std::string(op) + ": loss/score arity mismatch");
}
inline void check_loss_nonnegative(const LossVector& loss, const char* op) {
  for (double l : loss)
    if (!(l >= 0.0) || !std::isfinite(l))
      throw std::invalid_argument(std::string(op) + ": losses must be finite and >= 0");
}
}  // namespace detail

// Policy proportional to per-action hinge values. The normalizer is at least K
// on the sum-to-zero subspace, so the mass is always positive.
inline ActionDistribution induced_policy_hinge(const ScoreVector& s, MarginParam gamma) {
  std::vector<double> w(s.values().size());
  for (std::size_t a = 0; a < w.size(); ++a) w[a] = hinge(s[a], gamma);
  return ActionDistribution(std::move(w));
}

// Policy proportional to per-action ramp values; normalizer at least 1 because
// the max score is >= 0 on the sum-to-zero subspace.
inline ActionDistribution induced_policy_ramp(const ScoreVector& s, MarginParam gamma) {
  std::vector<double> w(s.values().size());
  for (std::size_t a = 0; a < w.size(); ++a) w[a] = ramp(s[a], gamma);
  return ActionDistribution(std::move(w));
}

// p^mu = (1 - K*mu) p + mu, valid for 0 <= mu <= 1/K.
inline ActionDistribution smooth(const ActionDistribution& p, double mu) {
  int k = p.num_actions();
  if (!(mu >= 0.0) || !(mu <= 1.0 / static_cast<double>(k)) || !std::isfinite(mu))
    throw std::domain_error("smooth: mu must lie in [0, 1/K]");
  std::vector<double> q(p.probs());
  double keep = 1.0 - static_cast<double>(k) * mu;
  for (double& x : q) x = keep * x + mu;
  return ActionDistribution(std::move(q));
}

// <loss, psi^gamma(s)>: cost-sensitive hinge surrogate.
inline double cc_hinge_loss(const ScoreVector& s, const LossVector& loss, MarginParam gamma) {
  detail::check_same_arity(s.values().size(), loss, "cc_hinge_loss");
  detail::check_loss_nonnegative(loss, "cc_hinge_loss");
  double total = 0.0;
  for (std::size_t a = 0; a < loss.size(); ++a) total += loss[a] * hinge(s[a], gamma);
  return total;
}

// <loss, phi^gamma(s)> with the ramp.
inline double cc_ramp_loss(const ScoreVector& s, const LossVector& loss, MarginParam gamma) {
  detail::check_same_arity(s.values().size(), loss, "cc_ramp_loss");
  detail::check_loss_nonnegative(loss, "cc_ramp_loss");
  double total = 0.0;
  for (std::size_t a = 0; a < loss.size(); ++a) total += loss[a] * ramp(s[a], gamma);
  return total;
}

// sum_a loss(a) * 1{s_a >= -gamma}: the hard-threshold upper end of the ramp chain.
inline double margin_loss(const ScoreVector& s, const LossVector& loss, MarginParam gamma) {
  detail::check_same_arity(s.values().size(), loss, "margin_loss");
  detail::check_loss_nonnegative(loss, "margin_loss");
  double total = 0.0;
  for (std::size_t a = 0; a < loss.size(); ++a)
    if (s[a] >= -gamma.value) total += loss[a];
  return total;
}

// Multiclass hinge at margin gamma on raw (uncentered) scores:
// max(1 - (g_{label} - max_{y != label} g_y) / gamma, 0).
inline double mc_hinge_loss(const std::vector<double>& raw_scores, int label, MarginParam gamma) {
  if (raw_scores.size() < 2) throw std::invalid_argument("mc_hinge_loss: need at least 2 classes");
  if (label < 0 || static_cast<std::size_t>(label) >= raw_scores.size())
    throw std::invalid_argument("mc_hinge_loss: label out of range");
  double best_other = -std::numeric_limits<double>::infinity();
  for (std::size_t y = 0; y < raw_scores.size(); ++y)
    if (static_cast<int>(y) != label) best_other = std::max(best_other, raw_scores[y]);
  double margin = raw_scores[static_cast<std::size_t>(label)] - best_other;
  return std::max(1.0 - margin / gamma.value, 0.0);
}

// Centering map g -> s = g - mean(g): the bridge from unconstrained multiclass
// scores to the sum-to-zero space.
inline ScoreVector center_scores(const std::vector<double>& raw_scores) {
  if (raw_scores.size() < 2) throw std::invalid_argument("center_scores: need at least 2 classes");
  double mean = 0.0;
  for (double g : raw_scores) mean += g;
  mean /= static_cast<double>(raw_scores.size());
  std::vector<double> s(raw_scores.size());
  for (std::size_t y = 0; y < s.size(); ++y) s[y] = raw_scores[y] - mean;
  return ScoreVector(std::move(s));
}

}  // namespace hingecb
