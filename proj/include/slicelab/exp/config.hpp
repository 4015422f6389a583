// Experiment configuration: shipped defaults, the key-value config file
// format, and the per-DU environment assembly.
#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "slicelab/mdp/scheduler.hpp"
#include "slicelab/radio/environment.hpp"
#include "slicelab/train/trainer.hpp"

namespace slicelab {

struct ConfigError : std::runtime_error {
  ConfigError(const std::string& file, int line, const std::string& msg)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + msg), line_number(line) {}
  int line_number;
};

// QoS contracts for the fixed three-slice setup. The MTC target is a
// fraction of the slice population, resolved per DU.
struct SliceDefaults {
  double embb_lambda_bps = 2e6;
  double embb_epsilon_bps = 0.5e6;
  double mtc_lambda_fraction = 0.8;
  double mtc_epsilon_fraction = 0.1;
  double mtc_min_rate_bps = 1e5;
  double urllc_lambda_s = 0.010;
  double urllc_epsilon_s = 0.005;
  double urllc_packet_mean_bits = 10e3;
};

struct TrafficDefaults {
  double embb_on_rate = 0.10;   // session starts per second per UE
  double embb_off_rate = 0.05;
  double mtc_on_rate = 0.20;
  double mtc_off_rate = 0.05;
  double urllc_packet_rate = 2.0;  // packets per second per UE
};

struct ExperimentConfig {
  RadioConfig radio;          // total_rbs is replaced by the bandwidth scenario
  SliceDefaults slices;
  TrafficDefaults traffic;
  TrainConfig train;
  int ues_per_du = 50;
  int rbs_low = 50;
  int rbs_high = 200;
  int final_eval_episodes = 3;
};

inline ExperimentConfig default_config() { return {}; }

// Small setup that exercises the full pipeline in minutes on a laptop. The
// QoS contracts are rescaled to the desk-scale rate regime so every slice
// has a reachable satisfaction band.
inline ExperimentConfig desk_scale_config() {
  ExperimentConfig c;
  c.ues_per_du = 10;
  c.rbs_low = 20;
  c.rbs_high = 40;
  c.radio.slots_per_step = 10;
  c.radio.neighbor_activity_prob = 1.0;  // steady interference keeps rates graded
  c.slices.embb_lambda_bps = 5e6;
  c.slices.embb_epsilon_bps = 4e6;
  c.slices.urllc_lambda_s = 0.25;
  c.slices.urllc_epsilon_s = 0.75;
  c.slices.urllc_packet_mean_bits = 200e3;
  c.traffic.embb_on_rate = 0.15;
  c.traffic.mtc_on_rate = 0.30;
  c.traffic.urllc_packet_rate = 1.0;
  c.train.n_actors = 3;
  c.train.n_evaluations = 5;
  c.train.n_iterations = 100;
  c.train.batch_size = 48;
  c.train.buffer_capacity = 100'000;
  c.train.updates_per_iteration = 5;
  c.train.gamma = 0.9;  // short bootstrap chain suits the small update budget
  c.train.lr = 1e-3;
  c.train.convergence_threshold = 0.0;  // always run the full N_t
  c.train.parallel_rollouts = true;
  return c;
}

namespace detail {

template <typename T>
T parse_value(const std::string& raw, const std::string& file, int line);

template <>
inline double parse_value<double>(const std::string& raw, const std::string& file, int line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigError(file, line, "expected a number, got '" + raw + "'");
  }
}

template <>
inline int parse_value<int>(const std::string& raw, const std::string& file, int line) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument("");
    return static_cast<int>(v);
  } catch (...) {
    throw ConfigError(file, line, "expected an integer, got '" + raw + "'");
  }
}

template <>
inline std::uint64_t parse_value<std::uint64_t>(const std::string& raw, const std::string& file,
                                                int line) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigError(file, line, "expected an unsigned integer, got '" + raw + "'");
  }
}

template <>
inline bool parse_value<bool>(const std::string& raw, const std::string& file, int line) {
  if (raw == "true" || raw == "1") return true;
  if (raw == "false" || raw == "0") return false;
  throw ConfigError(file, line, "expected true/false, got '" + raw + "'");
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

// Applies a key-value config file over `cfg`. Sections mirror the module
// layout: [radio], [slices], [traffic], [train], [experiment]. Unknown
// sections or keys and malformed values are line-precise errors.
inline void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(path, 0, "cannot open file");
  std::string line, section;
  int line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(path, line_no, "unterminated section header");
      section = line.substr(1, line.size() - 2);
      if (section != "radio" && section != "slices" && section != "traffic" && section != "train" &&
          section != "experiment")
        throw ConfigError(path, line_no, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(path, line_no, "expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError(path, line_no, "key outside of any section");

    auto d = [&](double& field) { field = detail::parse_value<double>(value, path, line_no); };
    auto i = [&](int& field) { field = detail::parse_value<int>(value, path, line_no); };
    auto b = [&](bool& field) { field = detail::parse_value<bool>(value, path, line_no); };

    bool known = true;
    if (section == "radio") {
      if (key == "rb_bandwidth_hz") d(cfg.radio.rb_bandwidth_hz);
      else if (key == "subcarrier_spacing_hz") d(cfg.radio.subcarrier_spacing_hz);
      else if (key == "tx_power_per_rb_dbm") d(cfg.radio.tx_power_per_rb_dbm);
      else if (key == "noise_variance_dbm") d(cfg.radio.noise_variance_dbm);
      else if (key == "path_loss_exponent") d(cfg.radio.path_loss_exponent);
      else if (key == "cell_radius_m") d(cfg.radio.cell_radius_m);
      else if (key == "neighbor_count") i(cfg.radio.neighbor_count);
      else if (key == "neighbor_activity_prob") d(cfg.radio.neighbor_activity_prob);
      else if (key == "slots_per_step") i(cfg.radio.slots_per_step);
      else if (key == "slot_duration_s") d(cfg.radio.slot_duration_s);
      else if (key == "ue_speed_mps") d(cfg.radio.ue_speed_mps);
      else known = false;
    } else if (section == "slices") {
      if (key == "embb_lambda_bps") d(cfg.slices.embb_lambda_bps);
      else if (key == "embb_epsilon_bps") d(cfg.slices.embb_epsilon_bps);
      else if (key == "mtc_lambda_fraction") d(cfg.slices.mtc_lambda_fraction);
      else if (key == "mtc_epsilon_fraction") d(cfg.slices.mtc_epsilon_fraction);
      else if (key == "mtc_min_rate_bps") d(cfg.slices.mtc_min_rate_bps);
      else if (key == "urllc_lambda_s") d(cfg.slices.urllc_lambda_s);
      else if (key == "urllc_epsilon_s") d(cfg.slices.urllc_epsilon_s);
      else if (key == "urllc_packet_mean_bits") d(cfg.slices.urllc_packet_mean_bits);
      else known = false;
    } else if (section == "traffic") {
      if (key == "embb_on_rate") d(cfg.traffic.embb_on_rate);
      else if (key == "embb_off_rate") d(cfg.traffic.embb_off_rate);
      else if (key == "mtc_on_rate") d(cfg.traffic.mtc_on_rate);
      else if (key == "mtc_off_rate") d(cfg.traffic.mtc_off_rate);
      else if (key == "urllc_packet_rate") d(cfg.traffic.urllc_packet_rate);
      else known = false;
    } else if (section == "train") {
      if (key == "n_iterations") i(cfg.train.n_iterations);
      else if (key == "n_actors") i(cfg.train.n_actors);
      else if (key == "n_evaluations") i(cfg.train.n_evaluations);
      else if (key == "batch_size") i(cfg.train.batch_size);
      else if (key == "buffer_capacity") {
        cfg.train.buffer_capacity = detail::parse_value<std::uint64_t>(value, path, line_no);
      } else if (key == "gamma") d(cfg.train.gamma);
      else if (key == "beta_temp") d(cfg.train.beta_temp);
      else if (key == "polyak_mix") d(cfg.train.polyak_mix);
      else if (key == "lr") d(cfg.train.lr);
      else if (key == "convergence_window") i(cfg.train.convergence_window);
      else if (key == "convergence_threshold") d(cfg.train.convergence_threshold);
      else if (key == "episode_length") i(cfg.train.episode_length);
      else if (key == "updates_per_iteration") i(cfg.train.updates_per_iteration);
      else if (key == "parallel_rollouts") b(cfg.train.parallel_rollouts);
      else if (key == "auto_temperature") b(cfg.train.auto_temperature);
      else known = false;
    } else if (section == "experiment") {
      if (key == "ues_per_du") i(cfg.ues_per_du);
      else if (key == "rbs_low") i(cfg.rbs_low);
      else if (key == "rbs_high") i(cfg.rbs_high);
      else if (key == "final_eval_episodes") i(cfg.final_eval_episodes);
      else known = false;
    }
    if (!known) throw ConfigError(path, line_no, "unknown key '" + key + "' in [" + section + "]");
  }
}

// Flat, deterministic key=value dump of the resolved configuration.
inline std::string render_config(const ExperimentConfig& c) {
  std::ostringstream o;
  o << "[radio]\n"
    << "rb_bandwidth_hz = " << c.radio.rb_bandwidth_hz << "\n"
    << "subcarrier_spacing_hz = " << c.radio.subcarrier_spacing_hz << "\n"
    << "tx_power_per_rb_dbm = " << c.radio.tx_power_per_rb_dbm << "\n"
    << "noise_variance_dbm = " << c.radio.noise_variance_dbm << "\n"
    << "path_loss_exponent = " << c.radio.path_loss_exponent << "\n"
    << "cell_radius_m = " << c.radio.cell_radius_m << "\n"
    << "neighbor_count = " << c.radio.neighbor_count << "\n"
    << "neighbor_activity_prob = " << c.radio.neighbor_activity_prob << "\n"
    << "slots_per_step = " << c.radio.slots_per_step << "\n"
    << "slot_duration_s = " << c.radio.slot_duration_s << "\n"
    << "ue_speed_mps = " << c.radio.ue_speed_mps << "\n"
    << "[slices]\n"
    << "embb_lambda_bps = " << c.slices.embb_lambda_bps << "\n"
    << "embb_epsilon_bps = " << c.slices.embb_epsilon_bps << "\n"
    << "mtc_lambda_fraction = " << c.slices.mtc_lambda_fraction << "\n"
    << "mtc_epsilon_fraction = " << c.slices.mtc_epsilon_fraction << "\n"
    << "mtc_min_rate_bps = " << c.slices.mtc_min_rate_bps << "\n"
    << "urllc_lambda_s = " << c.slices.urllc_lambda_s << "\n"
    << "urllc_epsilon_s = " << c.slices.urllc_epsilon_s << "\n"
    << "urllc_packet_mean_bits = " << c.slices.urllc_packet_mean_bits << "\n"
    << "[traffic]\n"
    << "embb_on_rate = " << c.traffic.embb_on_rate << "\n"
    << "embb_off_rate = " << c.traffic.embb_off_rate << "\n"
    << "mtc_on_rate = " << c.traffic.mtc_on_rate << "\n"
    << "mtc_off_rate = " << c.traffic.mtc_off_rate << "\n"
    << "urllc_packet_rate = " << c.traffic.urllc_packet_rate << "\n"
    << "[train]\n"
    << "n_iterations = " << c.train.n_iterations << "\n"
    << "n_actors = " << c.train.n_actors << "\n"
    << "n_evaluations = " << c.train.n_evaluations << "\n"
    << "batch_size = " << c.train.batch_size << "\n"
    << "buffer_capacity = " << c.train.buffer_capacity << "\n"
    << "gamma = " << c.train.gamma << "\n"
    << "beta_temp = " << c.train.beta_temp << "\n"
    << "polyak_mix = " << c.train.polyak_mix << "\n"
    << "lr = " << c.train.lr << "\n"
    << "convergence_window = " << c.train.convergence_window << "\n"
    << "convergence_threshold = " << c.train.convergence_threshold << "\n"
    << "episode_length = " << c.train.episode_length << "\n"
    << "updates_per_iteration = " << c.train.updates_per_iteration << "\n"
    << "parallel_rollouts = " << (c.train.parallel_rollouts ? "true" : "false") << "\n"
    << "auto_temperature = " << (c.train.auto_temperature ? "true" : "false") << "\n"
    << "[experiment]\n"
    << "ues_per_du = " << c.ues_per_du << "\n"
    << "rbs_low = " << c.rbs_low << "\n"
    << "rbs_high = " << c.rbs_high << "\n"
    << "final_eval_episodes = " << c.final_eval_episodes << "\n";
  return o.str();
}

// Slice population split per DU: Dirichlet-style weights (normalized unit
// exponentials) apportioned over the DU population, with every slice kept
// non-empty.
inline std::vector<int> du_populations(int total_ues, int n_slices, std::uint64_t master_seed,
                                       int du_index) {
  RngStream rng(derive_seed(master_seed, Stream::population, du_index));
  std::vector<double> w(n_slices);
  double sum = 0.0;
  for (double& x : w) {
    x = rng.exponential(1.0);
    sum += x;
  }
  std::vector<double> quotas(n_slices);
  for (int l = 0; l < n_slices; ++l) quotas[l] = w[l] / sum * total_ues;
  std::vector<int> counts = apportion_largest_remainder(quotas, total_ues);
  for (int l = 0; l < n_slices; ++l) {
    if (counts[l] > 0) continue;
    int donor = 0;
    for (int m = 1; m < n_slices; ++m)
      if (counts[m] > counts[donor]) donor = m;
    if (counts[donor] > 1) {
      --counts[donor];
      ++counts[l];
    }
  }
  return counts;
}

// Assembles one DU's environment: three slices (throughput, connection
// density, max delay) with the MTC contract resolved against this DU's
// slice population.
inline EnvConfig build_env_config(const ExperimentConfig& cfg, int total_rbs,
                                  const std::vector<int>& populations) {
  EnvConfig env;
  env.radio = cfg.radio;
  env.radio.total_rbs = total_rbs;

  SliceSpec embb;
  embb.slice_id = 0;
  embb.qos_kind = QosKind::throughput;
  embb.lambda_target = cfg.slices.embb_lambda_bps;
  embb.epsilon_margin = cfg.slices.embb_epsilon_bps;

  SliceSpec mtc;
  mtc.slice_id = 1;
  mtc.qos_kind = QosKind::connection_density;
  mtc.lambda_target = std::max(1.0, cfg.slices.mtc_lambda_fraction * populations[1]);
  mtc.epsilon_margin = std::max(1.0, cfg.slices.mtc_epsilon_fraction * populations[1]);
  mtc.mtc_min_rate_bps = cfg.slices.mtc_min_rate_bps;

  SliceSpec urllc;
  urllc.slice_id = 2;
  urllc.qos_kind = QosKind::max_delay;
  urllc.lambda_target = cfg.slices.urllc_lambda_s;
  urllc.epsilon_margin = cfg.slices.urllc_epsilon_s;
  urllc.packet_mean_bits = cfg.slices.urllc_packet_mean_bits;

  env.slices = {embb, mtc, urllc};
  env.populations = populations;
  env.traffic.session_on_rate_per_s = {cfg.traffic.embb_on_rate, cfg.traffic.mtc_on_rate, 0.0};
  env.traffic.session_off_rate_per_s = {cfg.traffic.embb_off_rate, cfg.traffic.mtc_off_rate, 0.0};
  env.traffic.packet_rate_per_s = cfg.traffic.urllc_packet_rate;
  return env;
}

inline EnvFactory make_env_factory(const ExperimentConfig& cfg, int total_rbs,
                                   std::uint64_t master_seed) {
  return [cfg, total_rbs, master_seed](int du, std::uint64_t env_seed) -> std::unique_ptr<EnvBase> {
    const std::vector<int> pops = du_populations(cfg.ues_per_du, 3, master_seed, du);
    return std::make_unique<MdpEnv>(build_env_config(cfg, total_rbs, pops), env_seed);
  };
}

}  // namespace slicelab
