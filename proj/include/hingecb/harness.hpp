#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hingecb/environments.hpp"
#include "hingecb/errors.hpp"
#include "hingecb/hinge_lmc.hpp"
#include "hingecb/records.hpp"
#include "hingecb/rng.hpp"
#include "hingecb/smooth_ftl.hpp"

namespace hingecb {

namespace detail {

// All serialized floats carry 12 significant digits. Config doubles are
// quantized to that precision on load, so an echoed config re-parses to the
// exact same doubles and re-runs byte-identically.
inline std::string format12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::string(buf);
}

inline double q12(double v) { return std::strtod(format12(v).c_str(), nullptr); }

inline nlohmann::json q12_array(const std::vector<double>& xs) {
  nlohmann::json a = nlohmann::json::array();
  for (double x : xs) a.push_back(q12(x));
  return a;
}

template <class T>
T require_field(const nlohmann::json& j, const char* key, const char* where) {
  if (!j.contains(key))
    throw ConfigError(std::string(where) + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string(where) + ": field '" + key + "' has the wrong type");
  }
}

template <class T>
T optional_field(const nlohmann::json& j, const char* key, T fallback, const char* where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string(where) + ": field '" + key + "' has the wrong type");
  }
}

}  // namespace detail

enum class Algorithm { hinge_lmc, smooth_ftl, uniform_baseline };

inline const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::hinge_lmc: return "hinge_lmc";
    case Algorithm::smooth_ftl: return "smooth_ftl";
    default: return "uniform_baseline";
  }
}

inline Algorithm algorithm_from_name(const std::string& name) {
  if (name == "hinge_lmc") return Algorithm::hinge_lmc;
  if (name == "smooth_ftl") return Algorithm::smooth_ftl;
  if (name == "uniform_baseline") return Algorithm::uniform_baseline;
  throw ConfigError("unknown algorithm '" + name + "'");
}

struct OutputNames {
  std::string csv = "records.csv";
  std::string summary = "summary.json";
  std::string svg = "regret.svg";
};

struct ExperimentConfig {
  Algorithm algorithm;
  ModelSpec spec;
  ParamVector theta_star;
  double margin_floor;
  double label_noise;
  long long horizon;
  int replicates;
  std::uint64_t base_seed;
  MarginParam gamma;
  HingeLmcConfig hinge_lmc;
  SmoothFtlConfig smooth_ftl;
  OutputNames output;

  void validate() const {
    if (horizon < 1) throw ConfigError("ExperimentConfig: horizon must be >= 1");
    if (replicates < 1) throw ConfigError("ExperimentConfig: replicates must be >= 1");
    hinge_lmc.validate(spec);
    smooth_ftl.validate(spec);
    // surface theta_star / margin / noise problems at load time
    StochasticEnv probe(spec, theta_star, margin_floor, label_noise);
    (void)probe;
  }
};

inline ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
  using detail::optional_field;
  using detail::q12;
  using detail::require_field;

  const nlohmann::json env = require_field<nlohmann::json>(j, "environment", "config");
  std::string kind = optional_field<std::string>(env, "kind", "stochastic", "environment");
  if (kind != "stochastic")
    throw ConfigError("environment: unknown kind '" + kind + "' (expected 'stochastic')");

  ModelSpec spec = [&] {
    try {
      return ModelSpec(require_field<int>(env, "context_dim", "environment"),
                       require_field<int>(env, "num_actions", "environment"),
                       q12(require_field<double>(env, "radius", "environment")),
                       q12(require_field<double>(env, "context_bound", "environment")));
    } catch (const std::domain_error& e) {
      throw ConfigError(std::string("environment: ") + e.what());
    }
  }();

  ParamVector theta_star =
      require_field<std::vector<double>>(env, "theta_star", "environment");
  for (double& v : theta_star) v = q12(v);
  if (static_cast<int>(theta_star.size()) != spec.param_dim())
    throw ConfigError("environment: theta_star must have num_actions * context_dim entries");

  const long long horizon = require_field<long long>(j, "horizon", "config");
  if (horizon < 1) throw ConfigError("config: horizon must be >= 1");

  MarginParam gamma = [&] {
    try {
      return MarginParam(q12(require_field<double>(j, "gamma", "config")));
    } catch (const std::domain_error& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }();

  ExperimentConfig cfg{
      algorithm_from_name(require_field<std::string>(j, "algorithm", "config")),
      spec,
      std::move(theta_star),
      q12(require_field<double>(env, "margin_floor", "environment")),
      q12(require_field<double>(env, "label_noise", "environment")),
      horizon,
      require_field<int>(j, "replicates", "config"),
      optional_field<std::uint64_t>(j, "base_seed", 1, "config"),
      gamma,
      HingeLmcConfig::defaults(spec, horizon, gamma),
      SmoothFtlConfig::defaults(spec, horizon, gamma),
      OutputNames{}};

  if (j.contains("hinge_lmc")) {
    const nlohmann::json& b = j.at("hinge_lmc");
    cfg.hinge_lmc.eta = optional_field<double>(b, "eta", cfg.hinge_lmc.eta, "hinge_lmc");
    cfg.hinge_lmc.mu = optional_field<double>(b, "mu", cfg.hinge_lmc.mu, "hinge_lmc");
    cfg.hinge_lmc.resample_cap =
        optional_field<long long>(b, "resample_cap", cfg.hinge_lmc.resample_cap, "hinge_lmc");
    cfg.hinge_lmc.faithful_resampling = optional_field<bool>(
        b, "faithful_resampling", cfg.hinge_lmc.faithful_resampling, "hinge_lmc");
    if (b.contains("lmc")) {
      const nlohmann::json& l = b.at("lmc");
      LmcConfig& m = cfg.hinge_lmc.lmc;
      m.steps = optional_field<double>(l, "steps", m.steps, "lmc");
      m.smoothing_samples =
          optional_field<double>(l, "smoothing_samples", m.smoothing_samples, "lmc");
      m.smoothing_width = optional_field<double>(l, "smoothing_width", m.smoothing_width, "lmc");
      m.ridge = optional_field<double>(l, "ridge", m.ridge, "lmc");
      m.step_size = optional_field<double>(l, "step_size", m.step_size, "lmc");
    }
  }
  cfg.hinge_lmc.eta = q12(cfg.hinge_lmc.eta);
  cfg.hinge_lmc.mu = q12(cfg.hinge_lmc.mu);
  cfg.hinge_lmc.lmc.steps = q12(cfg.hinge_lmc.lmc.steps);
  cfg.hinge_lmc.lmc.smoothing_samples = q12(cfg.hinge_lmc.lmc.smoothing_samples);
  cfg.hinge_lmc.lmc.smoothing_width = q12(cfg.hinge_lmc.lmc.smoothing_width);
  cfg.hinge_lmc.lmc.ridge = q12(cfg.hinge_lmc.lmc.ridge);
  cfg.hinge_lmc.lmc.step_size = q12(cfg.hinge_lmc.lmc.step_size);

  if (j.contains("smooth_ftl")) {
    const nlohmann::json& b = j.at("smooth_ftl");
    cfg.smooth_ftl.mu = optional_field<double>(b, "mu", cfg.smooth_ftl.mu, "smooth_ftl");
    cfg.smooth_ftl.erm.steps =
        optional_field<int>(b, "erm_steps", cfg.smooth_ftl.erm.steps, "smooth_ftl");
    cfg.smooth_ftl.erm.step_scale =
        optional_field<double>(b, "erm_step_scale", cfg.smooth_ftl.erm.step_scale, "smooth_ftl");
  }
  cfg.smooth_ftl.mu = q12(cfg.smooth_ftl.mu);
  cfg.smooth_ftl.erm.step_scale = q12(cfg.smooth_ftl.erm.step_scale);

  if (j.contains("output")) {
    const nlohmann::json& b = j.at("output");
    cfg.output.csv = optional_field<std::string>(b, "csv", cfg.output.csv, "output");
    cfg.output.summary = optional_field<std::string>(b, "summary", cfg.output.summary, "output");
    cfg.output.svg = optional_field<std::string>(b, "svg", cfg.output.svg, "output");
  }

  try {
    cfg.validate();
  } catch (const std::domain_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config parse failure in " + path.string() + ": " + e.what());
  }
  return parse_experiment_config(j);
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  using detail::q12;
  nlohmann::json env{{"kind", "stochastic"},
                     {"context_dim", cfg.spec.context_dim},
                     {"num_actions", cfg.spec.num_actions},
                     {"radius", q12(cfg.spec.radius)},
                     {"context_bound", q12(cfg.spec.context_bound)},
                     {"theta_star", detail::q12_array(cfg.theta_star)},
                     {"margin_floor", q12(cfg.margin_floor)},
                     {"label_noise", q12(cfg.label_noise)}};
  nlohmann::json lmc{{"steps", q12(cfg.hinge_lmc.lmc.steps)},
                     {"smoothing_samples", q12(cfg.hinge_lmc.lmc.smoothing_samples)},
                     {"smoothing_width", q12(cfg.hinge_lmc.lmc.smoothing_width)},
                     {"ridge", q12(cfg.hinge_lmc.lmc.ridge)},
                     {"step_size", q12(cfg.hinge_lmc.lmc.step_size)}};
  return nlohmann::json{
      {"algorithm", algorithm_name(cfg.algorithm)},
      {"environment", std::move(env)},
      {"horizon", cfg.horizon},
      {"replicates", cfg.replicates},
      {"base_seed", cfg.base_seed},
      {"gamma", q12(cfg.gamma.value)},
      {"hinge_lmc",
       {{"eta", q12(cfg.hinge_lmc.eta)},
        {"mu", q12(cfg.hinge_lmc.mu)},
        {"resample_cap", cfg.hinge_lmc.resample_cap},
        {"faithful_resampling", cfg.hinge_lmc.faithful_resampling},
        {"lmc", std::move(lmc)}}},
      {"smooth_ftl",
       {{"mu", q12(cfg.smooth_ftl.mu)},
        {"erm_steps", cfg.smooth_ftl.erm.steps},
        {"erm_step_scale", q12(cfg.smooth_ftl.erm.step_scale)}}},
      {"output",
       {{"csv", cfg.output.csv}, {"summary", cfg.output.summary}, {"svg", cfg.output.svg}}}};
}

template <class EnvFn>
RunLog run_uniform_baseline(const ModelSpec& spec, long long horizon, EnvFn&& env, Rng& rng) {
  const int k = spec.num_actions;
  ActionDistribution uniform = ActionDistribution::uniform(k);
  RunLog log;
  log.records.reserve(static_cast<std::size_t>(horizon));
  log.env_rounds.reserve(static_cast<std::size_t>(horizon));
  double cumulative = 0.0;
  for (long long t = 1; t <= horizon; ++t) {
    RoundSample round = env(t, rng);
    int action = rng.categorical(uniform.probs());
    double loss = round.loss[static_cast<std::size_t>(action)];
    cumulative += loss;
    RoundRecord rec;
    rec.round = t;
    rec.action = action;
    rec.propensity = 1.0 / static_cast<double>(k);
    rec.observed_loss = loss;
    rec.estimate = loss * static_cast<double>(k);
    rec.resample_count = 0;
    rec.cumulative_loss = cumulative;
    log.records.push_back(rec);
    log.env_rounds.push_back(std::move(round));
  }
  return log;
}

struct ReplicateSummary {
  int replicate;
  double cumulative_loss;
  double theta_star_surrogate;
  double hindsight_surrogate;
  std::vector<double> cumulative_at;                 // at the checkpoint rounds
  std::vector<double> benchmark_prefix_theta_star;   // surrogate prefix sums at checkpoints
  std::vector<double> benchmark_prefix_hindsight;
  std::vector<double> regret_theta_star;             // cumloss - prefix/K at checkpoints
  std::vector<double> regret_hindsight;
  std::vector<double> regret_series;                 // per round, vs the hindsight comparator
};

struct RunSummary {
  ExperimentConfig config;
  std::vector<long long> checkpoint_rounds;
  std::vector<ReplicateSummary> per_replicate;
  std::vector<double> mean_regret_theta_star;
  std::vector<double> mean_regret_hindsight;
  double mean_theta_star_surrogate;
  double mean_hindsight_surrogate;
  std::vector<RoundRecord> records;  // merged by (replicate, round)
};

inline std::vector<long long> regret_checkpoint_rounds(long long horizon) {
  return {std::max<long long>(1, horizon / 4), std::max<long long>(1, horizon / 2), horizon};
}

namespace detail {

inline ReplicateSummary summarize_replicate(const ExperimentConfig& cfg, int replicate,
                                            RunLog& log,
                                            const std::vector<long long>& checkpoints) {
  const double inv_k = 1.0 / static_cast<double>(cfg.spec.num_actions);
  BenchmarkReport hindsight =
      best_fixed_surrogate(cfg.spec, cfg.gamma, log.env_rounds, cfg.smooth_ftl.erm);

  ReplicateSummary rs;
  rs.replicate = replicate;
  rs.cumulative_loss = log.records.back().cumulative_loss;
  rs.regret_series.reserve(log.records.size());

  double star_prefix = 0.0, hind_prefix = 0.0;
  std::size_t next_cp = 0;
  for (std::size_t i = 0; i < log.env_rounds.size(); ++i) {
    const RoundSample& r = log.env_rounds[i];
    star_prefix += round_hinge_value(cfg.spec, cfg.theta_star, r.x, r.loss, cfg.gamma);
    hind_prefix += round_hinge_value(cfg.spec, hindsight.theta, r.x, r.loss, cfg.gamma);
    double cum = log.records[i].cumulative_loss;
    rs.regret_series.push_back(cum - inv_k * hind_prefix);
    while (next_cp < checkpoints.size() &&
           checkpoints[next_cp] == static_cast<long long>(i) + 1) {
      rs.cumulative_at.push_back(cum);
      rs.benchmark_prefix_theta_star.push_back(star_prefix);
      rs.benchmark_prefix_hindsight.push_back(hind_prefix);
      rs.regret_theta_star.push_back(cum - inv_k * star_prefix);
      rs.regret_hindsight.push_back(cum - inv_k * hind_prefix);
      ++next_cp;
    }
  }
  rs.theta_star_surrogate = star_prefix;
  rs.hindsight_surrogate = hind_prefix;

  for (RoundRecord& rec : log.records) rec.replicate = replicate;
  return rs;
}

}  // namespace detail

inline RunSummary run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::vector<long long> checkpoints = regret_checkpoint_rounds(cfg.horizon);

  auto run_one = [&cfg](int replicate) {
    Rng rng(cfg.base_seed + static_cast<std::uint64_t>(replicate));
    StochasticEnv env(cfg.spec, cfg.theta_star, cfg.margin_floor, cfg.label_noise);
    auto env_fn = [&env](long long, Rng& r) { return env.sample_round(r); };
    switch (cfg.algorithm) {
      case Algorithm::hinge_lmc:
        return run_hinge_lmc(cfg.spec, cfg.hinge_lmc, cfg.horizon, env_fn, rng);
      case Algorithm::smooth_ftl:
        return run_smooth_ftl(cfg.spec, cfg.smooth_ftl, cfg.horizon, env_fn, rng);
      default:
        return run_uniform_baseline(cfg.spec, cfg.horizon, env_fn, rng);
    }
  };

  std::vector<std::future<RunLog>> futures;
  futures.reserve(static_cast<std::size_t>(cfg.replicates));
  for (int r = 0; r < cfg.replicates; ++r)
    futures.push_back(std::async(std::launch::async, run_one, r));

  RunSummary summary{cfg,
                     checkpoints,
                     {},
                     std::vector<double>(checkpoints.size(), 0.0),
                     std::vector<double>(checkpoints.size(), 0.0),
                     0.0,
                     0.0,
                     {}};
  summary.records.reserve(static_cast<std::size_t>(cfg.replicates) *
                          static_cast<std::size_t>(cfg.horizon));
  // joining in replicate order keeps the merged stream deterministic
  // regardless of scheduling
  for (int r = 0; r < cfg.replicates; ++r) {
    RunLog log = futures[static_cast<std::size_t>(r)].get();
    ReplicateSummary rs = detail::summarize_replicate(cfg, r, log, checkpoints);
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
      summary.mean_regret_theta_star[i] += rs.regret_theta_star[i];
      summary.mean_regret_hindsight[i] += rs.regret_hindsight[i];
    }
    summary.mean_theta_star_surrogate += rs.theta_star_surrogate;
    summary.mean_hindsight_surrogate += rs.hindsight_surrogate;
    summary.per_replicate.push_back(std::move(rs));
    summary.records.insert(summary.records.end(), log.records.begin(), log.records.end());
  }
  return summary;
}

inline void emit_csv(const std::vector<RoundRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << "replicate,round,action,propensity,observed_loss,estimate,resample_count,"
         "cumulative_loss\n";
  for (const RoundRecord& r : records)
    out << r.replicate << ',' << r.round << ',' << r.action << ','
        << detail::format12(r.propensity) << ',' << detail::format12(r.observed_loss) << ','
        << detail::format12(r.estimate) << ',' << r.resample_count << ','
        << detail::format12(r.cumulative_loss) << '\n';
  if (!out.good()) throw IoError("write failure: " + path.string());
}

inline std::vector<RoundRecord> parse_csv_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  std::string line;
  if (!std::getline(in, line) ||
      line !=
          "replicate,round,action,propensity,observed_loss,estimate,resample_count,"
          "cumulative_loss")
    throw IoError("malformed record CSV header: " + path.string());
  std::vector<RoundRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 8) throw IoError("malformed record CSV row: " + line);
    RoundRecord r;
    r.replicate = std::stoll(fields[0]);
    r.round = std::stoll(fields[1]);
    r.action = std::stoi(fields[2]);
    r.propensity = std::strtod(fields[3].c_str(), nullptr);
    r.observed_loss = std::strtod(fields[4].c_str(), nullptr);
    r.estimate = std::strtod(fields[5].c_str(), nullptr);
    r.resample_count = std::stoll(fields[6]);
    r.cumulative_loss = std::strtod(fields[7].c_str(), nullptr);
    records.push_back(r);
  }
  return records;
}

inline nlohmann::json summary_to_json(const RunSummary& summary) {
  using detail::q12;
  nlohmann::json reps = nlohmann::json::array();
  for (const ReplicateSummary& rs : summary.per_replicate)
    reps.push_back(nlohmann::json{
        {"replicate", rs.replicate},
        {"cumulative_loss", q12(rs.cumulative_loss)},
        {"theta_star_surrogate", q12(rs.theta_star_surrogate)},
        {"hindsight_surrogate", q12(rs.hindsight_surrogate)},
        {"cumulative_at_checkpoints", detail::q12_array(rs.cumulative_at)},
        {"benchmark_prefix_theta_star", detail::q12_array(rs.benchmark_prefix_theta_star)},
        {"benchmark_prefix_hindsight", detail::q12_array(rs.benchmark_prefix_hindsight)},
        {"regret_theta_star", detail::q12_array(rs.regret_theta_star)},
        {"regret_hindsight", detail::q12_array(rs.regret_hindsight)},
        {"regret_series", detail::q12_array(rs.regret_series)}});
  double n = static_cast<double>(summary.per_replicate.size());
  nlohmann::json mean_star = nlohmann::json::array(), mean_hind = nlohmann::json::array();
  for (std::size_t i = 0; i < summary.checkpoint_rounds.size(); ++i) {
    mean_star.push_back(q12(summary.mean_regret_theta_star[i] / n));
    mean_hind.push_back(q12(summary.mean_regret_hindsight[i] / n));
  }
  return nlohmann::json{
      {"config_echo", config_to_json(summary.config)},
      {"per_replicate", std::move(reps)},
      {"regret_checkpoints",
       {{"rounds", summary.checkpoint_rounds},
        {"mean_vs_theta_star", std::move(mean_star)},
        {"mean_vs_hindsight", std::move(mean_hind)}}},
      {"benchmark",
       {{"theta_star_surrogate", q12(summary.mean_theta_star_surrogate / n)},
        {"hindsight_surrogate", q12(summary.mean_hindsight_surrogate / n)}}}};
}

inline void emit_json(const RunSummary& summary, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << summary_to_json(summary).dump(2) << '\n';
  if (!out.good()) throw IoError("write failure: " + path.string());
}

// Self-contained SVG line chart of cumulative regret per round: one muted
// polyline per series plus the bold mean. The y axis tops out at the exact
// series maximum.
inline void emit_svg(const std::vector<std::vector<double>>& series,
                     const std::filesystem::path& path) {
  if (series.empty()) throw std::invalid_argument("emit_svg: need at least one series");
  const std::size_t rounds = series.front().size();
  if (rounds == 0) throw std::invalid_argument("emit_svg: empty series");
  for (const std::vector<double>& s : series)
    if (s.size() != rounds) throw std::invalid_argument("emit_svg: unequal series lengths");

  std::vector<double> mean(rounds, 0.0);
  double y_max = series[0][0], y_min = series[0][0];
  for (const std::vector<double>& s : series)
    for (std::size_t t = 0; t < rounds; ++t) {
      mean[t] += s[t] / static_cast<double>(series.size());
      y_max = std::max(y_max, s[t]);
      y_min = std::min(y_min, s[t]);
    }
  y_min = std::min(y_min, 0.0);
  if (y_max == y_min) y_max = y_min + 1.0;  // flat chart still needs a span

  const double w = 960.0, h = 540.0, left = 70.0, right = 20.0, top = 30.0, bottom = 45.0;
  const double plot_w = w - left - right, plot_h = h - top - bottom;
  auto sx = [&](std::size_t t) {
    return rounds == 1 ? left + plot_w
                       : left + plot_w * static_cast<double>(t) /
                                    static_cast<double>(rounds - 1);
  };
  auto sy = [&](double v) { return top + plot_h * (y_max - v) / (y_max - y_min); };

  auto polyline = [&](const std::vector<double>& s, const char* stroke, double width) {
    std::string out = "  <polyline fill=\"none\" stroke=\"";
    out += stroke;
    out += "\" stroke-width=\"" + detail::format12(width) + "\" points=\"";
    for (std::size_t t = 0; t < rounds; ++t) {
      out += detail::format12(sx(t));
      out += ',';
      out += detail::format12(sy(s[t]));
      if (t + 1 < rounds) out += ' ';
    }
    out += "\"/>\n";
    return out;
  };
  static const char* palette[6] = {"#9db4c8", "#c8a87e", "#9fc89e",
                                   "#c89ec0", "#8fb8b2", "#b8a4d4"};

  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"960\" height=\"540\" "
         "viewBox=\"0 0 960 540\">\n"
      << "  <rect x=\"0\" y=\"0\" width=\"960\" height=\"540\" fill=\"#ffffff\"/>\n"
      << "  <line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
      << "\" y2=\"" << top + plot_h << "\" stroke=\"#333333\"/>\n"
      << "  <line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
      << top + plot_h << "\" stroke=\"#333333\"/>\n";
  for (std::size_t i = 0; i < series.size(); ++i)
    out << polyline(series[i], palette[i % 6], 1.0);
  out << polyline(mean, "#c0392b", 2.5);
  out << "  <text x=\"" << left + plot_w / 2.0 << "\" y=\"" << h - 10.0
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">round</text>\n"
      << "  <text x=\"18\" y=\"" << top + plot_h / 2.0
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" "
         "transform=\"rotate(-90 18 "
      << top + plot_h / 2.0 << ")\">cumulative regret</text>\n"
      << "  <text x=\"" << left - 8.0 << "\" y=\"" << top + 5.0
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
      << detail::format12(y_max) << "</text>\n"
      << "  <text x=\"" << left - 8.0 << "\" y=\"" << top + plot_h + 5.0
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
      << detail::format12(y_min) << "</text>\n"
      << "  <text x=\"" << left + plot_w << "\" y=\"" << top + plot_h + 18.0
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" << rounds
      << "</text>\n"
      << "</svg>\n";
  if (!out.good()) throw IoError("write failure: " + path.string());
}

// The full output bundle for one experiment under a directory.
inline void write_outputs(const RunSummary& summary, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory: " + dir.string());
  emit_csv(summary.records, dir / summary.config.output.csv);
  emit_json(summary, dir / summary.config.output.summary);
  // plot from the same 12-digit values the JSON carries, so re-plotting the
  // emitted summary reproduces this SVG byte for byte
  std::vector<std::vector<double>> series;
  series.reserve(summary.per_replicate.size());
  for (const ReplicateSummary& rs : summary.per_replicate) {
    std::vector<double> s = rs.regret_series;
    for (double& v : s) v = detail::q12(v);
    series.push_back(std::move(s));
  }
  emit_svg(series, dir / summary.config.output.svg);
}

}  // namespace hingecb
