// End-to-end training loop: per iteration, every distributed actor runs its
// evaluation episodes in its own DU environment; the joint experience is
// appended to the replay buffer; then one attention + critic update and one
// policy update per actor, in that order. Terminates early once the
// window-smoothed return stops moving.
#pragma once

#include <functional>
#include <future>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "slicelab/agent/attention_critic.hpp"
#include "slicelab/agent/baseline_critic.hpp"
#include "slicelab/agent/critic.hpp"
#include "slicelab/mdp/env.hpp"
#include "slicelab/train/replay.hpp"

namespace slicelab {

enum class CriticMode { attention, baseline };

inline const char* critic_mode_name(CriticMode m) {
  return m == CriticMode::attention ? "attention" : "baseline";
}

struct TrainConfig {
  int n_iterations = 100;    // N_t
  int n_actors = 6;          // N_m
  int n_evaluations = 10;    // N_e
  int batch_size = 128;      // kappa
  std::size_t buffer_capacity = 1'000'000;
  double gamma = 0.99;
  double beta_temp = 0.2;
  double polyak_mix = 0.005;
  double lr = 1e-4;
  int convergence_window = 10;
  double convergence_threshold = 1e-3;  // <= 0 disables early termination
  std::uint64_t seed = 1;
  int episode_length = 50;
  int updates_per_iteration = 1;
  bool parallel_rollouts = false;
  bool auto_temperature = false;  // tune beta toward a target entropy of -L

  void validate() const {
    if (n_iterations <= 0 || n_actors <= 0 || n_evaluations <= 0 || batch_size <= 0)
      throw std::invalid_argument("TrainConfig: counts must be > 0");
    if (buffer_capacity < static_cast<std::size_t>(batch_size))
      throw std::invalid_argument("TrainConfig: buffer_capacity must be >= batch_size");
    if (episode_length <= 0) throw std::invalid_argument("TrainConfig: episode_length must be > 0");
    if (updates_per_iteration <= 0)
      throw std::invalid_argument("TrainConfig: updates_per_iteration must be > 0");
  }
};

using EnvFactory = std::function<std::unique_ptr<EnvBase>(int actor_index, std::uint64_t seed)>;

struct IterationMetrics {
  int iteration = 0;
  std::vector<double> per_agent_return;
  double mean_return = 0.0;
  std::vector<double> per_slice_violation;  // 1 - mean satisfied fraction
  std::vector<std::pair<int, double>> throughput_samples;  // (slice_id, bps)
  int updates_performed = 0;
  std::vector<double> mean_attention;  // n_actors^2 row-major; attention mode only
};

enum class UpdateKind { attention, value, policy };

struct UpdateEvent {
  int iteration;
  UpdateKind kind;
  int agent;  // policy updates only, else -1
};

struct TrainResult {
  std::vector<IterationMetrics> iterations;
  std::vector<ActorNet> actors;
  std::unique_ptr<CentralCritic> critic;
  std::vector<UpdateEvent> update_log;
  int converged_at = -1;  // iteration index, -1 if the loop ran to N_t
  int warmup_skips = 0;   // update phases skipped while the buffer was filling
};

// Relative change of the window-mean return between the two most recent
// windows; needs 2 * window points, so it can never fire earlier.
inline bool window_converged(const std::vector<double>& returns, int window, double threshold) {
  if (threshold <= 0.0 || window <= 0) return false;
  if (returns.size() < static_cast<std::size_t>(2 * window)) return false;
  double recent = 0.0, previous = 0.0;
  for (int i = 0; i < window; ++i) {
    recent += returns[returns.size() - 1 - i];
    previous += returns[returns.size() - 1 - window - i];
  }
  recent /= window;
  previous /= window;
  return std::abs(recent - previous) <= threshold * std::max(std::abs(previous), 1e-12);
}

namespace detail {

struct Episode {
  std::vector<Transition> steps;
  double discounted_return = 0.0;
  std::vector<QoSReport> reports;
  std::vector<std::pair<int, double>> final_throughput;  // (slice, bps) of the last step
};

inline Episode run_episode(const ActorNet& actor, EnvBase& env, int horizon, double gamma,
                           RngStream* explore_rng) {
  Episode ep;
  ep.steps.reserve(horizon);
  Observation obs = env.reset();
  double discount = 1.0;
  for (int t = 0; t < horizon; ++t) {
    const auto act_out = explore_rng
                             ? actor.act(obs, ActMode::stochastic, explore_rng)
                             : actor.act(obs, ActMode::deterministic, nullptr);
    StepOut out = env.step(act_out.action);
    Transition tr;
    tr.state = obs;
    tr.action = act_out.action;
    tr.reward = out.reward;
    tr.next_state = out.next;
    tr.agent_id = actor.agent_id();
    ep.steps.push_back(std::move(tr));
    ep.discounted_return += discount * out.reward;
    discount *= gamma;
    if (t + 1 == horizon) {
      const auto& slices = env.ue_slice_ids();
      for (std::size_t n = 0; n < out.qos.per_user_throughput_bps.size(); ++n)
        ep.final_throughput.emplace_back(slices[n], out.qos.per_user_throughput_bps[n]);
    }
    ep.reports.push_back(std::move(out.qos));
    obs = out.next;
  }
  return ep;
}

}  // namespace detail

inline TrainResult run_training(const TrainConfig& cfg, const EnvFactory& make_env,
                                CriticMode mode) {
  cfg.validate();
  TrainResult result;

  // per-purpose streams derived from the master seed
  RngStream actor_init(derive_seed(cfg.seed, Stream::actor_init));
  RngStream critic_init(derive_seed(cfg.seed, Stream::critic_init));
  RngStream sample_rng(derive_seed(cfg.seed, Stream::buffer_sample));
  RngStream update_rng(derive_seed(cfg.seed, Stream::update));

  std::vector<std::unique_ptr<EnvBase>> envs;
  std::vector<RngStream> explore;
  for (int i = 0; i < cfg.n_actors; ++i) {
    envs.push_back(make_env(i, derive_seed(cfg.seed, Stream::env, i)));
    explore.emplace_back(derive_seed(cfg.seed, Stream::explore, i));
  }
  const int L = envs[0]->num_slices();

  ActorConfig actor_cfg;
  actor_cfg.n_slices = L;
  for (int i = 0; i < cfg.n_actors; ++i) result.actors.emplace_back(i, actor_cfg, actor_init);

  std::unique_ptr<CentralCritic> critic;
  if (mode == CriticMode::attention) {
    AttentionCriticConfig ac;
    ac.n_agents = cfg.n_actors;
    ac.n_slices = L;
    ac.lr = cfg.lr;
    critic = std::make_unique<AttentionCritic>(ac, critic_init);
  } else {
    BaselineCriticConfig bc;
    bc.n_agents = cfg.n_actors;
    bc.n_slices = L;
    bc.lr = cfg.lr;
    critic = std::make_unique<BaselineCritic>(bc, critic_init);
  }
  std::unique_ptr<CentralCritic> target = critic->clone();

  std::vector<Adam> actor_opts(cfg.n_actors, Adam(cfg.lr));
  ReplayBuffer buffer(cfg.buffer_capacity);
  double beta = cfg.beta_temp;

  std::vector<double> return_history;

  for (int it = 0; it < cfg.n_iterations; ++it) {
    // --- rollout phase: N_m actors x N_e episodes, each in its own env ---
    std::vector<std::vector<detail::Episode>> episodes(cfg.n_actors);
    auto roll_one = [&](int i) {
      std::vector<detail::Episode> eps;
      eps.reserve(cfg.n_evaluations);
      for (int e = 0; e < cfg.n_evaluations; ++e)
        eps.push_back(detail::run_episode(result.actors[i], *envs[i], cfg.episode_length,
                                          cfg.gamma, &explore[i]));
      return eps;
    };
    if (cfg.parallel_rollouts) {
      std::vector<std::future<std::vector<detail::Episode>>> futs;
      for (int i = 0; i < cfg.n_actors; ++i)
        futs.push_back(std::async(std::launch::async, roll_one, i));
      for (int i = 0; i < cfg.n_actors; ++i) episodes[i] = futs[i].get();
    } else {
      for (int i = 0; i < cfg.n_actors; ++i) episodes[i] = roll_one(i);
    }

    // canonical append order: evaluation index, then step
    for (int e = 0; e < cfg.n_evaluations; ++e) {
      for (int t = 0; t < cfg.episode_length; ++t) {
        JointRow row;
        row.agents.reserve(cfg.n_actors);
        for (int i = 0; i < cfg.n_actors; ++i) row.agents.push_back(episodes[i][e].steps[t]);
        buffer.append(std::move(row));
      }
    }

    IterationMetrics metrics;
    metrics.iteration = it;
    metrics.per_agent_return.assign(cfg.n_actors, 0.0);
    metrics.per_slice_violation.assign(L, 0.0);
    long report_count = 0;
    for (int i = 0; i < cfg.n_actors; ++i) {
      for (const auto& ep : episodes[i]) {
        metrics.per_agent_return[i] += ep.discounted_return / cfg.n_evaluations;
        for (const auto& rep : ep.reports) {
          for (int l = 0; l < L; ++l)
            metrics.per_slice_violation[l] += 1.0 - rep.per_slice_satisfied_fraction[l];
          ++report_count;
        }
      }
      const auto& last = episodes[i].back().final_throughput;
      metrics.throughput_samples.insert(metrics.throughput_samples.end(), last.begin(), last.end());
      metrics.mean_return += metrics.per_agent_return[i] / cfg.n_actors;
    }
    for (double& v : metrics.per_slice_violation) v /= static_cast<double>(report_count);

    // --- update phase: attention -> critic -> each policy ---
    if (buffer.size() >= static_cast<std::size_t>(cfg.batch_size)) {
      for (int u = 0; u < cfg.updates_per_iteration; ++u) {
        const auto batch = buffer.sample(cfg.batch_size, sample_rng);
        const CriticTargetConfig target_cfg{cfg.gamma, beta, cfg.polyak_mix};
        critic_update(*critic, *target, result.actors, batch, target_cfg, update_rng);
        if (mode == CriticMode::attention)
          result.update_log.push_back({it, UpdateKind::attention, -1});
        result.update_log.push_back({it, UpdateKind::value, -1});
        double mean_log_prob = 0.0;
        for (int i = 0; i < cfg.n_actors; ++i) {
          const auto stats =
              policy_update(result.actors[i], batch, *critic, beta, actor_opts[i], update_rng);
          mean_log_prob += stats.mean_log_prob / cfg.n_actors;
          result.update_log.push_back({it, UpdateKind::policy, i});
        }
        if (cfg.auto_temperature)
          beta = adjust_temperature(beta, mean_log_prob, /*target_entropy=*/-L, cfg.lr);
        ++metrics.updates_performed;
      }
    } else {
      ++result.warmup_skips;
    }
    if (auto* attn = dynamic_cast<AttentionCritic*>(critic.get()))
      metrics.mean_attention = attn->drain_mean_attention();

    return_history.push_back(metrics.mean_return);
    result.iterations.push_back(std::move(metrics));

    if (window_converged(return_history, cfg.convergence_window, cfg.convergence_threshold)) {
      result.converged_at = it;
      break;
    }
  }

  result.critic = std::move(critic);
  return result;
}

struct EvalResult {
  std::vector<double> episode_returns;  // per actor, episode-major
  std::vector<double> step_rewards;
  std::vector<std::pair<int, double>> throughput_samples;
};

// Deterministic-mode episodes on fresh environments; never touches any
// replay buffer.
inline EvalResult evaluate_policy(const std::vector<ActorNet>& actors, const EnvFactory& make_env,
                                  int episodes, double gamma, std::uint64_t seed,
                                  int episode_length = 50) {
  EvalResult out;
  for (std::size_t i = 0; i < actors.size(); ++i) {
    auto env = make_env(static_cast<int>(i), derive_seed(seed, Stream::eval, i));
    for (int e = 0; e < episodes; ++e) {
      const auto ep =
          detail::run_episode(actors[i], *env, episode_length, gamma, /*explore_rng=*/nullptr);
      out.episode_returns.push_back(ep.discounted_return);
      for (const auto& tr : ep.steps) out.step_rewards.push_back(tr.reward);
      for (const auto& rep : ep.reports) {
        const auto& slices = env->ue_slice_ids();
        for (std::size_t n = 0; n < rep.per_user_throughput_bps.size(); ++n)
          out.throughput_samples.emplace_back(slices[n], rep.per_user_throughput_bps[n]);
      }
    }
  }
  return out;
}

}  // namespace slicelab
