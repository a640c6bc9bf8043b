#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "hingecb/errors.hpp"
#include "hingecb/rng.hpp"

namespace hingecb {

// Brute-force reference implementations. Deliberately low-dimensional and
// slow; they exist so the production paths have something independent to be
// checked against, and they ship in the library so the CLI diagnostics can
// reach them too.

struct GridMin {
  std::vector<double> theta;
  double value;
};

// Exhaustive lattice minimization over the radius-R ball in dimension dim.
// resolution points per axis, endpoints included; lattice points outside the
// ball are skipped. Ties resolve to the lexicographically first point visited
// (axis 0 most significant). Budget: at most 10^7 lattice points, dim <= 4.
template <class Objective>
GridMin grid_erm(int dim, double radius, int resolution, Objective&& objective) {
  if (dim < 1 || dim > 4) throw OracleBudgetError("grid_erm: dim must be in [1, 4]");
  if (resolution < 2) throw std::invalid_argument("grid_erm: resolution must be >= 2");
  double points = std::pow(static_cast<double>(resolution), dim);
  if (points > 1e7) throw OracleBudgetError("grid_erm: lattice exceeds 1e7 points");

  std::vector<double> axis(static_cast<std::size_t>(resolution));
  for (int i = 0; i < resolution; ++i)
    axis[static_cast<std::size_t>(i)] =
        -radius + 2.0 * radius * static_cast<double>(i) / static_cast<double>(resolution - 1);

  std::vector<int> idx(static_cast<std::size_t>(dim), 0);
  std::vector<double> theta(static_cast<std::size_t>(dim));
  GridMin best;
  best.value = std::numeric_limits<double>::infinity();
  const double r2 = radius * radius;
  while (true) {
    double n2 = 0.0;
    for (int j = 0; j < dim; ++j) {
      theta[static_cast<std::size_t>(j)] = axis[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])];
      n2 += theta[static_cast<std::size_t>(j)] * theta[static_cast<std::size_t>(j)];
    }
    if (n2 <= r2 * (1.0 + 1e-12)) {
      double v = objective(theta);
      if (v < best.value) {
        best.value = v;
        best.theta = theta;
      }
    }
    int j = dim - 1;
    while (j >= 0) {
      if (++idx[static_cast<std::size_t>(j)] < resolution) break;
      idx[static_cast<std::size_t>(j)] = 0;
      --j;
    }
    if (j < 0) break;
  }
  if (best.theta.empty()) throw std::logic_error("grid_erm: empty feasible lattice");
  return best;
}

// Central finite differences, one axis at a time.
template <class Fn>
std::vector<double> finite_diff_grad(Fn&& f, const std::vector<double>& theta, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_diff_grad: h must be > 0");
  std::vector<double> grad(theta.size());
  std::vector<double> probe(theta);
  for (std::size_t j = 0; j < theta.size(); ++j) {
    probe[j] = theta[j] + h;
    double up = f(probe);
    probe[j] = theta[j] - h;
    double down = f(probe);
    probe[j] = theta[j];
    grad[j] = (up - down) / (2.0 * h);
  }
  return grad;
}

// Moments of min(Geometric(p), M), support {1, ..., M}:
// P(m = k) = p (1-p)^(k-1) for k < M, P(m = M) = (1-p)^(M-1).
struct TruncGeomMoments {
  double mean;
  double second_moment;
  double matched_mass;  // P(the geometric fired at or before M) = 1 - (1-p)^M
};

inline TruncGeomMoments truncated_geom_moments(double p, long long cap) {
  if (!(p > 0.0) || !(p <= 1.0)) throw std::invalid_argument("truncated_geom_moments: p in (0, 1]");
  if (cap < 1) throw std::invalid_argument("truncated_geom_moments: cap must be >= 1");
  if (cap > 10000000) throw OracleBudgetError("truncated_geom_moments: cap exceeds 1e7");
  const double q = 1.0 - p;
  double mean = 0.0, second = 0.0;
  double tail = 1.0;  // q^(k-1)
  for (long long k = 1; k < cap; ++k) {
    double mass = p * tail;
    mean += static_cast<double>(k) * mass;
    second += static_cast<double>(k) * static_cast<double>(k) * mass;
    tail *= q;
  }
  // tail is now q^(cap-1), the probability the loop never fired before cap.
  mean += static_cast<double>(cap) * tail;
  second += static_cast<double>(cap) * static_cast<double>(cap) * tail;
  return TruncGeomMoments{mean, second, 1.0 - tail * q};
}

// Closed form for the truncated mean; equals the summed value up to roundoff.
inline double truncated_geom_mean_closed_form(double p, long long cap) {
  if (!(p > 0.0) || !(p <= 1.0))
    throw std::invalid_argument("truncated_geom_mean_closed_form: p in (0, 1]");
  return (1.0 - std::pow(1.0 - p, static_cast<double>(cap))) / p;
}

// Exact sampler for P(theta) proportional to exp(-(F(theta) + ridge/2 |theta|^2))
// on the ball, via uniform proposals and an acceptance bound computed from a
// grid minimum of the exponent (1% headroom keeps acceptance <= 1). dim <= 3.
template <class Potential>
class RejectionSampler {
 public:
  RejectionSampler(const Potential& pot, double ridge, int grid_resolution = 0)
      : pot_(&pot), ridge_(ridge) {
    const int d = pot.dim();
    if (d < 1 || d > 3) throw OracleBudgetError("RejectionSampler: dim must be in [1, 3]");
    if (!(ridge >= 0.0)) throw std::invalid_argument("RejectionSampler: ridge must be >= 0");
    if (grid_resolution == 0) grid_resolution = d == 1 ? 4097 : (d == 2 ? 257 : 101);
    GridMin gm = grid_erm(d, pot.radius(), grid_resolution,
                          [&](const std::vector<double>& th) { return exponent(th); });
    exponent_floor_ = gm.value - 0.01 * std::max(1.0, std::fabs(gm.value));
  }

  double exponent(const std::vector<double>& theta) const {
    double n2 = 0.0;
    for (double v : theta) n2 += v * v;
    return pot_->value(theta) + 0.5 * ridge_ * n2;
  }

  std::vector<double> sample(Rng& rng) {
    const int d = pot_->dim();
    const double r = pot_->radius();
    std::vector<double> theta(static_cast<std::size_t>(d));
    while (true) {
      // uniform on the ball by cube rejection
      double n2;
      do {
        n2 = 0.0;
        for (int j = 0; j < d; ++j) {
          theta[static_cast<std::size_t>(j)] = rng.uniform(-r, r);
          n2 += theta[static_cast<std::size_t>(j)] * theta[static_cast<std::size_t>(j)];
        }
      } while (n2 > r * r);
      ++proposals_;
      double accept = std::exp(-(exponent(theta) - exponent_floor_));
      if (rng.uniform01() < accept) {
        ++accepts_;
        return theta;
      }
      if (proposals_ >= 100000 &&
          static_cast<double>(accepts_) < 1e-5 * static_cast<double>(proposals_))
        throw OracleBudgetError("RejectionSampler: acceptance rate fell below 1e-5");
    }
  }

  double acceptance_rate() const {
    return proposals_ == 0 ? 1.0
                           : static_cast<double>(accepts_) / static_cast<double>(proposals_);
  }

 private:
  const Potential* pot_;
  double ridge_;
  double exponent_floor_ = 0.0;
  std::int64_t proposals_ = 0;
  std::int64_t accepts_ = 0;
};

}  // namespace hingecb
