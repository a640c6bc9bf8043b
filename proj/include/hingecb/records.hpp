#pragma once

#include <vector>

#include "hingecb/model.hpp"

namespace hingecb {

// One environment interaction as the simulators produce it. mean_loss may be
// empty when the generating process has no known conditional mean.
struct RoundSample {
  Context x;
  LossVector loss;       // realized full loss vector; only one coordinate is revealed
  LossVector mean_loss;  // conditional means, for benchmarks
};

// One learner round in the normalized log format shared by all algorithms.
// resample_count is 0 for algorithms that do not resample.
struct RoundRecord {
  long long replicate = 0;
  long long round = 0;
  int action = 0;
  double propensity = 0.0;
  double observed_loss = 0.0;
  double estimate = 0.0;  // played coordinate of the loss estimate
  long long resample_count = 0;
  double cumulative_loss = 0.0;
};

// A full run: the normalized per-round log plus the raw environment draws
// (kept in memory only, for benchmark computation).
struct RunLog {
  std::vector<RoundRecord> records;
  std::vector<RoundSample> env_rounds;
};

}  // namespace hingecb
