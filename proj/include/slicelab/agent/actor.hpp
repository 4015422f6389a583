// Per-DU policy: a tanh MLP trunk with Gaussian mean / log-std heads,
// squashed into slice fractions, updated by the entropy-regularized
// pathwise policy gradient.
#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "slicelab/mdp/types.hpp"
#include "slicelab/nn/gaussian.hpp"
#include "slicelab/nn/mlp.hpp"
#include "slicelab/nn/optim.hpp"
#include "slicelab/rng.hpp"

namespace slicelab {

// One aligned row of all agents' transitions for the same environment step.
struct JointRow {
  std::vector<Transition> agents;
};

// Differentiable Q used by the policy update. Implementations must not
// change any of their own parameter values inside this call.
class CriticHandle {
 public:
  virtual ~CriticHandle() = default;
  virtual double q_with_action_grad(int agent, const std::vector<Observation>& obs_all,
                                    const std::vector<ActionVec>& act_all,
                                    std::vector<double>& dq_daction) = 0;
};

enum class ActMode { stochastic, deterministic };

struct ActorConfig {
  int n_slices = 3;
  std::vector<int> trunk_widths{128, 256, 256};
};

class ActorNet {
 public:
  ActorNet(int agent_id, const ActorConfig& cfg, RngStream& init_rng)
      : agent_id_(agent_id), n_slices_(cfg.n_slices) {
    std::vector<int> widths;
    widths.push_back(3 * cfg.n_slices);
    widths.insert(widths.end(), cfg.trunk_widths.begin(), cfg.trunk_widths.end());
    const std::string prefix = "actor" + std::to_string(agent_id);
    trunk_ = Mlp(MLPSpec{widths, Act::tanh_fn, Act::tanh_fn}, prefix + ".trunk");
    const int trunk_out = widths.back();
    mean_head_ = Mlp(MLPSpec{{trunk_out, cfg.n_slices}, Act::identity, Act::identity}, prefix + ".mean");
    log_std_head_ =
        Mlp(MLPSpec{{trunk_out, cfg.n_slices}, Act::identity, Act::identity}, prefix + ".log_std");
    trunk_.init(init_rng);
    mean_head_.init(init_rng);
    log_std_head_.init(init_rng);
  }

  int agent_id() const { return agent_id_; }
  int n_slices() const { return n_slices_; }
  int policy_updates() const { return n_updates_; }

  std::vector<ParamTensor*> params() {
    std::vector<ParamTensor*> out = trunk_.params();
    for (auto* p : mean_head_.params()) out.push_back(p);
    for (auto* p : log_std_head_.params()) out.push_back(p);
    return out;
  }

  struct ActOut {
    ActionVec action;
    double log_prob = 0.0;
  };

  // Stochastic mode draws through the reparameterized head; deterministic
  // mode returns the squashed mean (evaluation use).
  ActOut act(const Observation& obs, ActMode mode, RngStream* rng) const {
    if (!obs.finite()) throw std::invalid_argument("ActorNet::act: non-finite observation");
    if (obs.dim() != trunk_.spec().input_dim())
      throw std::invalid_argument("ActorNet::act: observation dim mismatch");
    if (mode == ActMode::stochastic && rng == nullptr)
      throw std::invalid_argument("ActorNet::act: stochastic mode needs randomness");
    const std::vector<double> h = trunk_.forward(obs.flat());
    const std::vector<double> mean = mean_head_.forward(h);
    std::vector<double> log_std = log_std_head_.forward(h);
    for (double& v : log_std) v = soft_clamp_log_std(v);
    const GaussianSample s =
        sample_squashed(mean, log_std, mode == ActMode::stochastic ? rng : nullptr);
    return {ActionVec{s.action}, s.log_prob};
  }

  // Internal forward with caches, used by the policy update.
  struct HeadForward {
    Mlp::Cache trunk, mean, log_std;
    std::vector<double> mean_out, raw_log_std, clamped_log_std;
  };

  HeadForward forward_heads(const Observation& obs) const {
    HeadForward f;
    const std::vector<double> h = trunk_.forward(obs.flat(), &f.trunk);
    f.mean_out = mean_head_.forward(h, &f.mean);
    f.raw_log_std = log_std_head_.forward(h, &f.log_std);
    f.clamped_log_std = f.raw_log_std;
    for (double& v : f.clamped_log_std) v = soft_clamp_log_std(v);
    return f;
  }

  // Backpropagates gradients sitting at the clamped mean/log_std outputs.
  void backward_heads(HeadForward& f, std::span<const double> d_mean,
                      std::span<const double> d_log_std_clamped) {
    std::vector<double> d_raw(d_log_std_clamped.begin(), d_log_std_clamped.end());
    for (std::size_t i = 0; i < d_raw.size(); ++i) d_raw[i] *= soft_clamp_log_std_grad(f.raw_log_std[i]);
    std::vector<double> d_h = mean_head_.backward(f.mean, d_mean);
    const std::vector<double> d_h2 = log_std_head_.backward(f.log_std, d_raw);
    for (std::size_t i = 0; i < d_h.size(); ++i) d_h[i] += d_h2[i];
    trunk_.backward(f.trunk, d_h);
  }

  void count_update() { ++n_updates_; }

 private:
  int agent_id_;
  int n_slices_;
  int n_updates_ = 0;
  mutable Mlp trunk_, mean_head_, log_std_head_;
};

struct PolicyUpdateStats {
  double loss = 0.0;
  double mean_q = 0.0;
  double mean_log_prob = 0.0;
  double mean_log_std = 0.0;
};

// One gradient step on the entropy temperature toward a target entropy:
// beta grows while the policy is more deterministic than the target and
// shrinks otherwise. Log-space update, clamped to a sane range.
inline double adjust_temperature(double beta, double mean_log_prob, double target_entropy,
                                 double lr) {
  const double grad = mean_log_prob + target_entropy;  // E[log pi] - (-H_target)
  const double log_beta = std::log(std::max(beta, 1e-6)) + lr * grad;
  return std::min(std::max(std::exp(log_beta), 1e-4), 10.0);
}

// One ascent step on E[ Q(s, a~) - beta * log pi(a~|s) ] with a~ drawn via the
// reparameterized head at the batch states. Touches only this actor's
// parameters; the critic is queried for Q and dQ/da.
inline PolicyUpdateStats policy_update(ActorNet& actor, std::span<const JointRow* const> batch,
                                       CriticHandle& critic, double beta_temp, Adam& opt,
                                       RngStream& rng) {
  if (batch.empty()) throw std::invalid_argument("policy_update: empty batch");
  const int i = actor.agent_id();
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  PolicyUpdateStats stats;

  zero_grads(actor.params());
  for (const JointRow* row : batch) {
    const Observation& obs = row->agents[i].state;
    ActorNet::HeadForward f = actor.forward_heads(obs);
    const GaussianSample s = sample_squashed(f.mean_out, f.clamped_log_std, &rng);

    std::vector<Observation> obs_all;
    std::vector<ActionVec> act_all;
    obs_all.reserve(row->agents.size());
    act_all.reserve(row->agents.size());
    for (std::size_t j = 0; j < row->agents.size(); ++j) {
      obs_all.push_back(row->agents[j].state);
      act_all.push_back(static_cast<int>(j) == i ? ActionVec{s.action} : row->agents[j].action);
    }
    std::vector<double> dq_da;
    const double q = critic.q_with_action_grad(i, obs_all, act_all, dq_da);

    // loss = mean(beta * log_prob - Q); gradients scaled by 1/B here
    std::vector<double> d_action(dq_da.size());
    for (std::size_t k = 0; k < dq_da.size(); ++k) d_action[k] = -dq_da[k] * inv_b;
    const GaussianGrads g = gaussian_backward(s, d_action, beta_temp * inv_b);
    actor.backward_heads(f, g.d_mean, g.d_log_std);

    stats.loss += (beta_temp * s.log_prob - q) * inv_b;
    stats.mean_q += q * inv_b;
    stats.mean_log_prob += s.log_prob * inv_b;
    for (double v : f.clamped_log_std) stats.mean_log_std += v * inv_b / actor.n_slices();
  }
  if (!std::isfinite(stats.loss))
    throw std::runtime_error("policy_update: non-finite loss");
  opt.step(actor.params());
  zero_grads(actor.params());
  actor.count_update();
  return stats;
}

}  // namespace slicelab
