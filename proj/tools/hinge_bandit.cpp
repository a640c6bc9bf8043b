#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hingecb/harness.hpp"
#include "hingecb/oracles.hpp"

namespace fs = std::filesystem;
using namespace hingecb;

namespace {

int cmd_run(const std::string& config_path, const std::string& out_dir, bool have_seed,
            std::uint64_t seed) {
  ExperimentConfig cfg = load_experiment_config(config_path);
  if (have_seed) cfg.base_seed = seed;
  RunSummary summary = run_experiment(cfg);
  write_outputs(summary, out_dir);

  const double n = static_cast<double>(summary.per_replicate.size());
  std::cout << "algorithm: " << algorithm_name(cfg.algorithm) << "\n"
            << "horizon: " << cfg.horizon << "  replicates: " << cfg.replicates
            << "  base_seed: " << cfg.base_seed << "\n";
  for (std::size_t i = 0; i < summary.checkpoint_rounds.size(); ++i)
    std::cout << "round " << summary.checkpoint_rounds[i]
              << "  mean regret vs hindsight: "
              << detail::format12(summary.mean_regret_hindsight[i] / n)
              << "  vs theta_star: "
              << detail::format12(summary.mean_regret_theta_star[i] / n) << "\n";
  std::cout << "wrote " << (fs::path(out_dir) / cfg.output.csv).string() << ", "
            << (fs::path(out_dir) / cfg.output.summary).string() << ", "
            << (fs::path(out_dir) / cfg.output.svg).string() << "\n";
  return 0;
}

template <class Potential>
nlohmann::json sampler_diagnostics(const Potential& pot, const LmcConfig& cfg, long long n,
                                   std::uint64_t seed) {
  const std::size_t d = static_cast<std::size_t>(pot.dim());
  std::vector<double> sum(d, 0.0), sumsq(d, 0.0);
  Rng rng(seed);
  for (long long i = 0; i < n; ++i) {
    ParamVector theta = lmc_sample(pot, cfg, rng);
    for (std::size_t j = 0; j < d; ++j) {
      sum[j] += theta[j];
      sumsq[j] += theta[j] * theta[j];
    }
  }
  std::vector<double> mean(d), var(d);
  for (std::size_t j = 0; j < d; ++j) {
    mean[j] = sum[j] / static_cast<double>(n);
    var[j] = sumsq[j] / static_cast<double>(n) - mean[j] * mean[j];
  }

  const long long n_oracle = std::max<long long>(n, 20000);
  RejectionSampler<Potential> oracle(pot, cfg.ridge);
  Rng orng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<double> osum(d, 0.0), osumsq(d, 0.0);
  for (long long i = 0; i < n_oracle; ++i) {
    ParamVector theta = oracle.sample(orng);
    for (std::size_t j = 0; j < d; ++j) {
      osum[j] += theta[j];
      osumsq[j] += theta[j] * theta[j];
    }
  }
  std::vector<double> omean(d), ovar(d);
  for (std::size_t j = 0; j < d; ++j) {
    omean[j] = osum[j] / static_cast<double>(n_oracle);
    ovar[j] = osumsq[j] / static_cast<double>(n_oracle) - omean[j] * omean[j];
  }

  return nlohmann::json{{"dim", pot.dim()},
                        {"n_samples", n},
                        {"seed", seed},
                        {"empirical_mean", detail::q12_array(mean)},
                        {"empirical_cov_diag", detail::q12_array(var)},
                        {"oracle_mean", detail::q12_array(omean)},
                        {"oracle_cov_diag", detail::q12_array(ovar)},
                        {"oracle_draws", n_oracle},
                        {"oracle_acceptance_rate", detail::q12(oracle.acceptance_rate())}};
}

int cmd_sample_test(int dim, long long samples, std::uint64_t seed, const std::string& out) {
  nlohmann::json result;
  if (dim == 1) {
    // pure ridge on the radius-6 interval: the unit Gaussian, truncated
    FlatPotential pot{1, 6.0};
    LmcConfig cfg = LmcConfig::practical(6.0);
    cfg.ridge = 1.0;
    result = sampler_diagnostics(pot, cfg, samples, seed);
    result["target"] = "ridge_gaussian";
  } else {
    // two-action hinge potential with three history rounds
    ModelSpec spec(1, 2, 1.0, 1.0);
    HingePotential pot(spec, 1.0, MarginParam(0.5));
    pot.append(Context{0.9}, LossVector{2.0, 0.0});
    pot.append(Context{-0.7}, LossVector{0.0, 1.5});
    pot.append(Context{0.4}, LossVector{1.0, 0.0});
    LmcConfig cfg = LmcConfig::practical(1.0);
    result = sampler_diagnostics(pot, cfg, samples, seed);
    result["target"] = "hinge_potential";
  }
  std::string text = result.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out);
    if (!f) throw IoError("cannot open for writing: " + out);
    f << text;
    if (!f.good()) throw IoError("write failure: " + out);
  }
  return 0;
}

int cmd_plot(const std::string& summary_path, const std::string& out) {
  std::ifstream in(summary_path);
  if (!in) throw IoError("cannot open summary: " + summary_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("summary parse failure in " + summary_path + ": " + e.what());
  }
  if (!j.contains("per_replicate") || !j["per_replicate"].is_array() ||
      j["per_replicate"].empty())
    throw ConfigError("summary has no per_replicate entries: " + summary_path);
  std::vector<std::vector<double>> series;
  for (const auto& rep : j["per_replicate"]) {
    if (!rep.contains("regret_series"))
      throw ConfigError("summary replicate lacks regret_series: " + summary_path);
    series.push_back(rep["regret_series"].get<std::vector<double>>());
  }
  emit_svg(series, out);
  std::cout << "wrote " << out << "\n";
  return 0;
}

int cmd_bench_params(long long T, int d, int k, double gamma_value, double radius,
                     double context_bound, double loss_bound) {
  ModelSpec spec(d, k, radius, context_bound);
  MarginParam gamma(gamma_value);
  if (loss_bound <= 0.0) loss_bound = static_cast<double>(default_resample_cap(T));
  double eta = default_hinge_lmc_eta(spec, T, gamma);
  LmcConfig cfg = theoretical_params(spec, T, gamma, eta, loss_bound);
  auto line = [](const char* name, double v) {
    std::cout << name << " = " << detail::format12(v) << "\n";
  };
  std::cout << "T = " << T << "\n"
            << "context_dim = " << d << "\n"
            << "num_actions = " << k << "\n";
  line("gamma", gamma.value);
  line("radius", radius);
  line("context_bound", context_bound);
  line("lipschitz", spec.lipschitz());
  line("score_bound", spec.score_bound());
  line("loss_norm_bound", loss_bound);
  line("eta", eta);
  line("mu", default_hinge_lmc_mu(spec, T));
  std::cout << "resample_cap = " << default_resample_cap(T) << "\n";
  line("smoothing_width", cfg.smoothing_width);
  line("ridge", cfg.ridge);
  line("steps", cfg.steps);
  line("smoothing_samples", cfg.smoothing_samples);
  line("step_size", cfg.step_size);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"surrogate-loss contextual bandit experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  std::uint64_t seed = 0;
  CLI::App* run = app.add_subcommand("run", "run an experiment from a config file");
  run->add_option("--config", config_path, "experiment config (JSON)")->required();
  run->add_option("--out-dir", out_dir, "output directory (default .)");
  CLI::Option* seed_opt = run->add_option("--seed", seed, "override base_seed");

  int dim = 1;
  long long samples = 5000;
  std::uint64_t st_seed = 1;
  std::string st_out;
  CLI::App* st = app.add_subcommand("sample-test", "sampler-vs-oracle diagnostics");
  st->add_option("--dim", dim, "target dimension")->required()->check(CLI::Range(1, 2));
  st->add_option("--samples", samples, "number of sampler draws")
      ->required()
      ->check(CLI::PositiveNumber);
  st->add_option("--seed", st_seed, "rng seed")->required();
  st->add_option("--out", st_out, "write the diagnostics JSON here instead of stdout");

  std::string summary_path, svg_out;
  CLI::App* plot = app.add_subcommand("plot", "render a regret SVG from a summary JSON");
  plot->add_option("--summary", summary_path, "summary JSON from 'run'")->required();
  plot->add_option("--out", svg_out, "output SVG path")->required();

  long long bp_T = 0;
  int bp_d = 0, bp_K = 0;
  double bp_gamma = 0.0, bp_R = 1.0, bp_xmax = 1.0, bp_loss = 0.0;
  CLI::App* bp = app.add_subcommand("bench-params", "print the theoretical sampler parameters");
  bp->add_option("--T", bp_T, "horizon")->required()->check(CLI::PositiveNumber);
  bp->add_option("--d", bp_d, "context dimension")->required()->check(CLI::PositiveNumber);
  bp->add_option("--K", bp_K, "number of actions")->required()->check(CLI::Range(2, 1000000));
  bp->add_option("--gamma", bp_gamma, "margin parameter")->required();
  bp->add_option("--R", bp_R, "parameter ball radius (default 1)");
  bp->add_option("--xmax", bp_xmax, "context norm bound (default 1)");
  bp->add_option("--loss-bound", bp_loss,
                 "loss estimate norm bound (default: the resample cap)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run->parsed()) return cmd_run(config_path, out_dir, seed_opt->count() > 0, seed);
    if (st->parsed()) return cmd_sample_test(dim, samples, st_seed, st_out);
    if (plot->parsed()) return cmd_plot(summary_path, svg_out);
    return cmd_bench_params(bp_T, bp_d, bp_K, bp_gamma, bp_R, bp_xmax, bp_loss);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const OracleBudgetError& e) {
    std::cerr << "oracle budget exceeded: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
}
