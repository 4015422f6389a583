// No-attention baseline: one shared MLP over the concatenated joint
// observation-action vector with a per-agent output head.
#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "slicelab/agent/critic.hpp"
#include "slicelab/nn/mlp.hpp"
#include "slicelab/nn/optim.hpp"

namespace slicelab {

struct BaselineCriticConfig {
  int n_agents = 6;
  int n_slices = 3;
  std::vector<int> hidden_widths{128, 256, 256};
  double lr = 1e-4;
};

class BaselineCritic final : public CentralCritic {
 public:
  BaselineCritic(const BaselineCriticConfig& cfg, RngStream& init_rng) : cfg_(cfg), opt_(cfg.lr) {
    std::vector<int> widths;
    widths.push_back(cfg.n_agents * 4 * cfg.n_slices);
    widths.insert(widths.end(), cfg.hidden_widths.begin(), cfg.hidden_widths.end());
    widths.push_back(cfg.n_agents);
    net_ = Mlp(MLPSpec{widths, Act::tanh_fn, Act::identity}, "baseline");
    net_.init(init_rng);
  }

  int num_agents() const override { return cfg_.n_agents; }
  int num_slices() const override { return cfg_.n_slices; }
  long value_update_count() const override { return n_value_steps_; }

  double q_value(int agent, const std::vector<Observation>& obs_all,
                 const std::vector<ActionVec>& act_all) override {
    return net_.forward(joint_input(obs_all, act_all))[agent];
  }

  std::vector<double> q_all(const std::vector<Observation>& obs_all,
                            const std::vector<ActionVec>& act_all) override {
    return net_.forward(joint_input(obs_all, act_all));
  }

  double q_with_action_grad(int agent, const std::vector<Observation>& obs_all,
                            const std::vector<ActionVec>& act_all,
                            std::vector<double>& dq_daction) override {
    Mlp::Cache cache;
    const std::vector<double> q = net_.forward(joint_input(obs_all, act_all), &cache);
    std::vector<double> d_out(cfg_.n_agents, 0.0);
    d_out[agent] = 1.0;
    const std::vector<double> d_in = net_.backward(cache, d_out, /*accumulate=*/false);
    const int per_agent = 4 * cfg_.n_slices;
    const int offset = agent * per_agent + 3 * cfg_.n_slices;
    dq_daction.assign(d_in.begin() + offset, d_in.begin() + offset + cfg_.n_slices);
    return q[agent];
  }

  double td_loss_and_grads(std::span<const JointRow* const> rows,
                           const std::vector<std::vector<double>>& targets) override {
    if (rows.empty()) throw std::invalid_argument("td_step: empty batch");
    if (targets.size() != rows.size()) throw std::invalid_argument("td_step: target/batch size mismatch");
    zero_grads(params());
    const double inv_r = 1.0 / static_cast<double>(rows.size());
    double loss = 0.0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      std::vector<Observation> obs;
      std::vector<ActionVec> act;
      for (const auto& t : rows[r]->agents) {
        obs.push_back(t.state);
        act.push_back(t.action);
      }
      Mlp::Cache cache;
      const std::vector<double> q = net_.forward(joint_input(obs, act), &cache);
      std::vector<double> d_out(cfg_.n_agents);
      for (int i = 0; i < cfg_.n_agents; ++i) {
        const double diff = q[i] - targets[r][i];
        loss += diff * diff * inv_r;
        d_out[i] = 2.0 * diff * inv_r;
      }
      net_.backward(cache, d_out);
    }
    return loss;
  }

  double td_step(std::span<const JointRow* const> rows,
                 const std::vector<std::vector<double>>& targets) override {
    const double loss = td_loss_and_grads(rows, targets);
    opt_.step(params());
    ++n_value_steps_;
    zero_grads(params());
    return loss;
  }

  std::vector<ParamTensor*> params() override { return net_.params(); }

  std::unique_ptr<CentralCritic> clone() const override {
    return std::make_unique<BaselineCritic>(*this);
  }

 private:
  std::vector<double> joint_input(const std::vector<Observation>& obs_all,
                                  const std::vector<ActionVec>& act_all) const {
    if (static_cast<int>(obs_all.size()) != cfg_.n_agents ||
        static_cast<int>(act_all.size()) != cfg_.n_agents)
      throw std::invalid_argument("BaselineCritic: need observations and actions for every agent");
    std::vector<double> in;
    in.reserve(cfg_.n_agents * 4 * cfg_.n_slices);
    for (int j = 0; j < cfg_.n_agents; ++j) {
      if (obs_all[j].num_slices() != cfg_.n_slices || act_all[j].size() != cfg_.n_slices)
        throw std::invalid_argument("BaselineCritic: obs/action dim mismatch");
      const std::vector<double> o = obs_all[j].flat();
      in.insert(in.end(), o.begin(), o.end());
      in.insert(in.end(), act_all[j].fractions.begin(), act_all[j].fractions.end());
    }
    return in;
  }

  BaselineCriticConfig cfg_;
  Mlp net_;
  Adam opt_;
  long n_value_steps_ = 0;
};

}  // namespace slicelab
