#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace hingecb {

// Deterministic random stream. mt19937_64 is fully specified by the standard;
// the distribution transforms below are hand-rolled because the std::*_distribution
// algorithms are implementation-defined and would break cross-platform replay.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // [0, 1), 53-bit resolution
  double uniform01() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  // Box-Muller, no cached spare: every call consumes exactly two uniforms,
  // so the stream position is a pure function of the call count.
  double gaussian() {
    double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  double gaussian(double mean, double stddev) {
    return mean + stddev * gaussian();
  }

  // Coordinates filled in index order.
  void fill_gaussian(std::vector<double>& out, double stddev) {
    for (double& v : out) v = stddev * gaussian();
  }

  std::vector<double> gaussian_vector(std::size_t n, double stddev) {
    std::vector<double> v(n);
    fill_gaussian(v, stddev);
    return v;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // CDF walk. probs need not be exactly normalized; the draw is against the
  // realized total so a few ulps of drift cannot push the result out of range.
  int categorical(const std::vector<double>& probs) {
    if (probs.empty()) throw std::invalid_argument("categorical: empty distribution");
    double total = 0.0;
    for (double p : probs) {
      if (!(p >= 0.0)) throw std::invalid_argument("categorical: negative probability");
      total += p;
    }
    if (!(total > 0.0)) throw std::invalid_argument("categorical: zero mass");
    double r = uniform01() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
      acc += probs[i];
      if (r < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size() - 1);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace hingecb
