// Experiment front door: scenario selection, artifact writing, manifests,
// and the attention-vs-baseline comparison.
#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "slicelab/exp/config.hpp"
#include "slicelab/exp/metrics.hpp"
#include "slicelab/nn/checkpoint.hpp"

namespace slicelab {

inline const std::vector<std::string> kSliceNames{"embb", "mtc", "urllc"};
inline constexpr const char* kToolVersion = "slicelab 0.1.0";

struct CliOptions {
  std::string config_path;  // empty -> shipped defaults
  std::string mode = "attention";
  std::string bw = "low";
  std::uint64_t seed = 1;
  std::string out_dir = "runs/out";
  int episodes = -1;  // overrides final_eval_episodes when >= 0
  bool compare = false;
  bool dry_run = false;
  int compare_seeds = 5;
};

// Exit codes: 0 ok, 2 configuration error, 3 runtime failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

struct RunArtifacts {
  std::filesystem::path dir;
  std::vector<std::string> files;
  double final_smoothed_return = 0.0;  // mean return over the last convergence_window iterations
};

namespace detail {

inline std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

inline nlohmann::json config_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  std::istringstream in(render_config(cfg));
  std::string line, section;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '[') {
      section = line.substr(1, line.size() - 2);
      continue;
    }
    const auto eq = line.find(" = ");
    j[section][line.substr(0, eq)] = line.substr(eq + 3);
  }
  return j;
}

inline double final_smoothed(const std::vector<MetricsRecord>& records, int window) {
  const int n = static_cast<int>(records.size());
  const int w = std::min(std::max(window, 1), n);
  double s = 0.0;
  for (int i = n - w; i < n; ++i) s += records[i].mean_return;
  return s / w;
}

}  // namespace detail

// Runs one (mode, bandwidth, seed) scenario and writes returns.csv, the
// per-slice CDF tables, the violation summary, checkpoints and the manifest.
inline RunArtifacts run_one(const ExperimentConfig& base, CriticMode mode, const std::string& bw,
                            std::uint64_t seed, const std::filesystem::path& out_dir,
                            int eval_episodes_override = -1) {
  namespace fs = std::filesystem;
  ExperimentConfig cfg = base;
  cfg.train.seed = seed;
  const int total_rbs = bw == "high" ? cfg.rbs_high : cfg.rbs_low;
  const int eval_episodes =
      eval_episodes_override >= 0 ? eval_episodes_override : cfg.final_eval_episodes;

  fs::create_directories(out_dir);
  RunArtifacts art;
  art.dir = out_dir;

  nlohmann::json manifest;
  manifest["tool"] = kToolVersion;
  manifest["started_utc"] = detail::utc_now();
  manifest["seed"] = seed;
  manifest["mode"] = critic_mode_name(mode);
  manifest["bandwidth"] = bw;
  manifest["total_rbs"] = total_rbs;
  manifest["config"] = detail::config_json(cfg);
  manifest["schema"]["returns.csv"] = "iteration,mode,return_agent_i...,mean_return";
  manifest["schema"]["cdf_<slice>.csv"] = "phase,throughput_bps,cum_fraction";
  manifest["schema"]["violations.csv"] = "mode,slice,mean_violation,std_violation,n_iterations";

  const auto write_manifest = [&](const std::string& status, const std::string& error = "") {
    manifest["finished_utc"] = detail::utc_now();
    manifest["status"] = status;
    if (!error.empty()) manifest["error"] = error;
    manifest["files"] = art.files;
    std::ofstream f(out_dir / "manifest.json");
    f << manifest.dump(2) << '\n';
  };

  try {
    const EnvFactory factory = make_env_factory(cfg, total_rbs, seed);
    TrainResult result = run_training(cfg.train, factory, mode);

    std::vector<MetricsRecord> records;
    std::vector<std::vector<double>> violation_series;
    std::vector<std::vector<double>> training_samples(kSliceNames.size());
    for (const auto& it : result.iterations) {
      records.push_back(to_metrics_record(it, mode));
      violation_series.push_back(it.per_slice_violation);
      for (const auto& [slice, bps] : it.throughput_samples)
        training_samples[slice].push_back(bps);
    }
    art.final_smoothed_return = detail::final_smoothed(records, cfg.train.convergence_window);
    manifest["final_smoothed_return"] = art.final_smoothed_return;
    manifest["converged_at"] = result.converged_at;

    write_returns_csv((out_dir / "returns.csv").string(), records);
    art.files.push_back("returns.csv");

    std::vector<std::vector<double>> final_samples(kSliceNames.size());
    if (eval_episodes > 0) {
      const EvalResult ev = evaluate_policy(result.actors, factory, eval_episodes, cfg.train.gamma,
                                            seed, cfg.train.episode_length);
      for (const auto& [slice, bps] : ev.throughput_samples) final_samples[slice].push_back(bps);
    }
    for (std::size_t l = 0; l < kSliceNames.size(); ++l) {
      const std::string name = "cdf_" + kSliceNames[l] + ".csv";
      std::vector<std::pair<std::string, std::vector<double>>> phases;
      phases.emplace_back("training", training_samples[l]);
      phases.emplace_back("final", final_samples[l]);
      write_cdf_csv((out_dir / name).string(), phases);
      art.files.push_back(name);
    }

    write_violations_csv((out_dir / "violations.csv").string(), mode, kSliceNames, violation_series);
    art.files.push_back("violations.csv");

    // attention inspection stream (attention mode only)
    if (mode == CriticMode::attention) {
      std::ofstream f(out_dir / "attention.csv");
      f << "iteration,query_agent,other_agent,mean_weight\n";
      const int n = cfg.train.n_actors;
      for (const auto& it : result.iterations) {
        if (it.mean_attention.empty()) continue;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            f << it.iteration << ',' << i << ',' << j << ','
              << fmt_double(it.mean_attention[static_cast<std::size_t>(i) * n + j]) << '\n';
          }
      }
      art.files.push_back("attention.csv");
      manifest["schema"]["attention.csv"] = "iteration,query_agent,other_agent,mean_weight";
    }

    for (auto& actor : result.actors) {
      const std::string name = "actor_" + std::to_string(actor.agent_id()) + ".ckpt";
      std::vector<const ParamTensor*> ps;
      for (auto* p : actor.params()) ps.push_back(p);
      save_checkpoint((out_dir / name).string(), ps);
      art.files.push_back(name);
    }
    {
      std::vector<const ParamTensor*> ps;
      for (auto* p : result.critic->params()) ps.push_back(p);
      save_checkpoint((out_dir / "critic.ckpt").string(), ps);
      art.files.push_back("critic.ckpt");
    }

    write_manifest("ok");
    return art;
  } catch (...) {
    try {
      write_manifest("error", "run failed; partial artifacts listed");
    } catch (...) {
    }
    throw;
  }
}

// Reads mean_return per iteration back out of a returns.csv.
inline std::vector<double> read_mean_returns_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::getline(f, line);  // header
  std::vector<double> out;
  while (std::getline(f, line)) {
    const auto pos = line.find_last_of(',');
    if (pos == std::string::npos) continue;
    out.push_back(std::stod(line.substr(pos + 1)));
  }
  return out;
}

struct CompareRow {
  std::uint64_t seed;
  double attention_final;
  double baseline_final;
  double relative_improvement;  // (attention - baseline) / |baseline|
};

// Pure function of the two runs' returns.csv files.
inline CompareRow compare_from_csvs(const std::filesystem::path& attention_csv,
                                    const std::filesystem::path& baseline_csv, std::uint64_t seed,
                                    int window) {
  const auto last_mean = [window](const std::vector<double>& xs) {
    const int w = std::min<std::size_t>(std::max(window, 1), xs.size());
    double s = 0.0;
    for (int i = 0; i < w; ++i) s += xs[xs.size() - 1 - i];
    return s / w;
  };
  const double a = last_mean(read_mean_returns_csv(attention_csv));
  const double b = last_mean(read_mean_returns_csv(baseline_csv));
  return {seed, a, b, (a - b) / std::max(std::abs(b), 1e-12)};
}

inline void write_compare_csv(const std::filesystem::path& path, const std::vector<CompareRow>& rows) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  f << "seed,attention_final,baseline_final,relative_improvement\n";
  double ma = 0, mb = 0;
  for (const auto& r : rows) {
    f << r.seed << ',' << fmt_double(r.attention_final) << ',' << fmt_double(r.baseline_final) << ','
      << fmt_double(r.relative_improvement) << '\n';
    ma += r.attention_final / rows.size();
    mb += r.baseline_final / rows.size();
  }
  f << "mean," << fmt_double(ma) << ',' << fmt_double(mb) << ','
    << fmt_double((ma - mb) / std::max(std::abs(mb), 1e-12)) << '\n';
}

inline int run_experiment(const CliOptions& opt, std::ostream& log = std::cout) {
  ExperimentConfig cfg = default_config();
  try {
    if (!opt.config_path.empty()) apply_config_file(cfg, opt.config_path);
    if (opt.mode != "attention" && opt.mode != "baseline")
      throw ConfigError("<cli>", 0, "mode must be attention or baseline");
    if (opt.bw != "low" && opt.bw != "high")
      throw ConfigError("<cli>", 0, "bw must be low or high");
    cfg.radio.validate();
    cfg.train.validate();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  if (opt.dry_run) {
    log << "# resolved configuration (mode=" << opt.mode << ", bw=" << opt.bw
        << ", seed=" << opt.seed << ")\n"
        << render_config(cfg);
    return kExitOk;
  }

  const CriticMode mode = opt.mode == "attention" ? CriticMode::attention : CriticMode::baseline;
  namespace fs = std::filesystem;
  try {
    if (!opt.compare) {
      const RunArtifacts art =
          run_one(cfg, mode, opt.bw, opt.seed, fs::path(opt.out_dir), opt.episodes);
      log << "run complete: " << art.dir.string()
          << " final_smoothed_return=" << fmt_double(art.final_smoothed_return) << '\n';
      return kExitOk;
    }

    std::vector<CompareRow> rows;
    for (int s = 0; s < opt.compare_seeds; ++s) {
      const std::uint64_t seed = opt.seed + static_cast<std::uint64_t>(s);
      const fs::path base = fs::path(opt.out_dir);
      const fs::path adir = base / ("attention_" + opt.bw + "_s" + std::to_string(seed));
      const fs::path bdir = base / ("baseline_" + opt.bw + "_s" + std::to_string(seed));
      run_one(cfg, CriticMode::attention, opt.bw, seed, adir, opt.episodes);
      run_one(cfg, CriticMode::baseline, opt.bw, seed, bdir, opt.episodes);
      rows.push_back(compare_from_csvs(adir / "returns.csv", bdir / "returns.csv", seed,
                                       cfg.train.convergence_window));
      log << "seed " << seed << ": attention=" << fmt_double(rows.back().attention_final)
          << " baseline=" << fmt_double(rows.back().baseline_final)
          << " improvement=" << fmt_double(rows.back().relative_improvement) << '\n';
    }
    write_compare_csv(fs::path(opt.out_dir) / "compare_summary.csv", rows);
    log << "comparison written to " << (fs::path(opt.out_dir) / "compare_summary.csv").string()
        << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace slicelab
