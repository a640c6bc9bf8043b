// Minimal library tour: one stochastic environment, both learners, and the
// uniform reference, printed as per-quarter average losses.

#include <cmath>
#include <cstdio>
#include <vector>

#include <hingecb/hingecb.hpp>

using namespace hingecb;

namespace {

void print_quarters(const char* name, const RunLog& log) {
  const auto& rec = log.records;
  std::size_t n = rec.size();
  std::printf("%-12s", name);
  for (int q = 0; q < 4; ++q) {
    std::size_t lo = n * static_cast<std::size_t>(q) / 4;
    std::size_t hi = n * static_cast<std::size_t>(q + 1) / 4;
    double sum = 0.0;
    for (std::size_t i = lo; i < hi; ++i) sum += rec[i].observed_loss;
    std::printf("  %.3f", sum / static_cast<double>(hi - lo));
  }
  std::printf("  | total %.1f\n", rec.back().cumulative_loss);
}

}  // namespace

int main() {
  // Three arms in the plane at 120 degrees; contexts near an arm keep a score
  // gap of at least margin_floor, so the star action is identifiable.
  ModelSpec spec(2, 3, 2.0, 1.0);
  std::vector<double> theta_star;
  for (int a = 0; a < 3; ++a) {
    double ang = 2.0 * 3.14159265358979323846 * a / 3.0;
    theta_star.push_back(1.1 * std::cos(ang));
    theta_star.push_back(1.1 * std::sin(ang));
  }
  StochasticEnv env(spec, theta_star, 0.6, 0.05);
  MarginParam gamma(0.25);
  long long horizon = 512;
  auto env_fn = [&](long long, Rng& r) { return env.sample_round(r); };

  std::printf("T=%lld, K=3, d'=2, label noise 0.05; average loss per quarter\n", horizon);

  {
    Rng rng(7);
    SmoothFtlConfig cfg = SmoothFtlConfig::defaults(spec, horizon, gamma);
    RunLog log = run_smooth_ftl(spec, cfg, horizon, env_fn, rng);
    print_quarters("smooth_ftl", log);
  }
  {
    Rng rng(7);
    HingeLmcConfig cfg = HingeLmcConfig::defaults(spec, horizon, gamma);
    cfg.lmc.steps = 120;  // lighter chain than the default, plenty for a demo
    RunLog log = run_hinge_lmc(spec, cfg, horizon, env_fn, rng);
    print_quarters("hinge_lmc", log);
  }
  {
    Rng rng(7);
    RunLog log = run_uniform_baseline(spec, horizon, env_fn, rng);
    print_quarters("uniform", log);
  }
  return 0;
}
