// Central critic interface shared by the attention critic and the
// no-attention baseline, plus the temporal-difference update both use.
#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "slicelab/agent/actor.hpp"
#include "slicelab/mdp/types.hpp"
#include "slicelab/nn/optim.hpp"

namespace slicelab {

class CentralCritic : public CriticHandle {
 public:
  virtual int num_agents() const = 0;
  virtual int num_slices() const = 0;

  virtual double q_value(int agent, const std::vector<Observation>& obs_all,
                         const std::vector<ActionVec>& act_all) = 0;
  virtual std::vector<double> q_all(const std::vector<Observation>& obs_all,
                                    const std::vector<ActionVec>& act_all) = 0;

  // Squared-error TD loss summed over agents, averaged over rows, with
  // parameter gradients left accumulated (no optimizer step).
  virtual double td_loss_and_grads(std::span<const JointRow* const> rows,
                                   const std::vector<std::vector<double>>& targets) = 0;

  // One TD step against precomputed targets. Returns the pre-step loss.
  virtual double td_step(std::span<const JointRow* const> rows,
                         const std::vector<std::vector<double>>& targets) = 0;

  virtual std::vector<ParamTensor*> params() = 0;
  virtual std::unique_ptr<CentralCritic> clone() const = 0;

  virtual long attention_update_count() const { return 0; }
  virtual long value_update_count() const = 0;
};

struct CriticTargetConfig {
  double gamma = 0.99;
  double beta_temp = 0.2;
  double polyak_mix = 0.005;

  void validate() const {
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must be in [0,1)");
    if (beta_temp < 0.0) throw std::invalid_argument("beta_temp must be >= 0");
  }
};

// y_i = r_i + gamma * Qbar_i(s', a') - beta * log pi_i(a'_i | s'_i), with a'
// freshly sampled from the current policies and Qbar from the target copy.
inline std::vector<std::vector<double>> compute_targets(CentralCritic& target,
                                                        std::vector<ActorNet>& actors,
                                                        std::span<const JointRow* const> batch,
                                                        const CriticTargetConfig& cfg,
                                                        RngStream& rng) {
  cfg.validate();
  const int n_agents = target.num_agents();
  std::vector<std::vector<double>> y;
  y.reserve(batch.size());
  for (const JointRow* row : batch) {
    if (static_cast<int>(row->agents.size()) != n_agents)
      throw std::invalid_argument("compute_targets: row not aligned with agent count");
    std::vector<Observation> next_obs;
    std::vector<ActionVec> next_act;
    std::vector<double> next_logp(n_agents);
    next_obs.reserve(n_agents);
    next_act.reserve(n_agents);
    for (int j = 0; j < n_agents; ++j) {
      next_obs.push_back(row->agents[j].next_state);
      const auto out = actors[j].act(row->agents[j].next_state, ActMode::stochastic, &rng);
      next_act.push_back(out.action);
      next_logp[j] = out.log_prob;
    }
    const std::vector<double> qbar = target.q_all(next_obs, next_act);
    std::vector<double> row_y(n_agents);
    for (int i = 0; i < n_agents; ++i)
      row_y[i] = row->agents[i].reward + cfg.gamma * qbar[i] - cfg.beta_temp * next_logp[i];
    y.push_back(std::move(row_y));
  }
  return y;
}

struct CriticUpdateResult {
  double loss = 0.0;
  std::vector<std::vector<double>> targets;
};

// Eq.-style TD update: build targets from the target copy and the current
// policies, take one staged Adam step on the online critic, then track the
// target by Polyak averaging. Actor parameters are read-only here.
inline CriticUpdateResult critic_update(CentralCritic& online, CentralCritic& target,
                                        std::vector<ActorNet>& actors,
                                        std::span<const JointRow* const> batch,
                                        const CriticTargetConfig& cfg, RngStream& rng) {
  if (batch.empty()) throw std::invalid_argument("critic_update: empty batch");
  CriticUpdateResult res;
  res.targets = compute_targets(target, actors, batch, cfg, rng);
  res.loss = online.td_step(batch, res.targets);
  if (!std::isfinite(res.loss)) throw std::runtime_error("critic_update: non-finite loss");
  polyak_update(target.params(), online.params(), cfg.polyak_mix);
  return res;
}

}  // namespace slicelab
