// Attention-based central critic: per-agent encoders embed (obs, action)
// pairs; a shared query/key bilinear map scores other agents' embeddings;
// their leaky-rectified value projections mix under the softmax weights;
// per-agent heads read (own embedding, mixed info) into a scalar Q.
#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "slicelab/agent/critic.hpp"
#include "slicelab/nn/mlp.hpp"
#include "slicelab/nn/optim.hpp"

namespace slicelab {

struct AttentionCriticConfig {
  int n_agents = 6;
  int n_slices = 3;
  int embed_dim = 128;
  int d_attn = 32;
  std::vector<int> q_head_widths{256, 256};
  double lr = 1e-4;
};

class AttentionCritic final : public CentralCritic {
 public:
  AttentionCritic(const AttentionCriticConfig& cfg, RngStream& init_rng)
      : cfg_(cfg),
        wk_("attn.wk", {cfg.d_attn, cfg.embed_dim}),
        wq_("attn.wq", {cfg.d_attn, cfg.embed_dim}),
        value_("attn.value", {cfg.embed_dim, cfg.embed_dim}),
        opt_attention_(cfg.lr),
        opt_value_(cfg.lr) {
    if (cfg.n_agents < 1) throw std::invalid_argument("AttentionCritic: need at least one agent");
    if (cfg.d_attn <= 0) throw std::invalid_argument("AttentionCritic: d_attn must be > 0");
    const int in_dim = 4 * cfg.n_slices;  // obs 3L + action L
    for (int i = 0; i < cfg.n_agents; ++i) {
      encoders_.emplace_back(MLPSpec{{in_dim, cfg.embed_dim}, Act::leaky_relu, Act::leaky_relu},
                             "enc" + std::to_string(i));
      std::vector<int> widths{2 * cfg.embed_dim};
      widths.insert(widths.end(), cfg.q_head_widths.begin(), cfg.q_head_widths.end());
      widths.push_back(1);
      q_heads_.emplace_back(MLPSpec{widths, Act::tanh_fn, Act::identity}, "qhead" + std::to_string(i));
    }
    const double bound_attn = 1.0 / std::sqrt(static_cast<double>(cfg.embed_dim));
    for (auto* t : {&wk_, &wq_, &value_})
      for (double& v : t->v) v = init_rng.uniform(-bound_attn, bound_attn);
    for (auto& e : encoders_) e.init(init_rng);
    for (auto& h : q_heads_) h.init(init_rng);
  }

  int num_agents() const override { return cfg_.n_agents; }
  int num_slices() const override { return cfg_.n_slices; }
  long attention_update_count() const override { return n_attention_steps_; }
  long value_update_count() const override { return n_value_steps_; }

  // How many attention vectors have passed the simplex check.
  long alpha_checks() const { return n_alpha_checks_; }

  // Observes every attention vector computed (compact, over j != i).
  void set_alpha_observer(std::function<void(int, const std::vector<double>&)> fn) {
    alpha_observer_ = std::move(fn);
  }

  // Mean attention weight per (query agent, other agent) since the last
  // drain; row-major n x n with zero diagonal. Empty if nothing accumulated.
  std::vector<double> drain_mean_attention() {
    std::vector<double> out;
    if (alpha_accum_count_ > 0) {
      out = alpha_accum_;
      for (double& v : out) v /= static_cast<double>(alpha_accum_count_);
    }
    alpha_accum_.assign(static_cast<std::size_t>(cfg_.n_agents) * cfg_.n_agents, 0.0);
    alpha_accum_count_ = 0;
    return out;
  }

  // e_i = leaky_relu(W [s_i; a_i] + b)
  std::vector<double> embed(int agent, const Observation& obs, const ActionVec& act) const {
    return encoders_[agent].forward(concat_input(obs, act));
  }

  // alpha over j != i (ascending j, self skipped): softmax of
  // (W_k e_j) . (W_q e_i) / sqrt(d_attn). One agent total -> empty.
  std::vector<double> attention_weights(int agent,
                                        const std::vector<std::vector<double>>& embeddings) const {
    const int n = static_cast<int>(embeddings.size());
    if (n <= 1) return {};
    const std::vector<double> qi = mat_vec(wq_, embeddings[agent]);
    std::vector<double> scores;
    scores.reserve(n - 1);
    const double scale = 1.0 / std::sqrt(static_cast<double>(cfg_.d_attn));
    for (int j = 0; j < n; ++j) {
      if (j == agent) continue;
      scores.push_back(dot(mat_vec(wk_, embeddings[j]), qi) * scale);
    }
    apply_activation(Act::softmax, scores);
    check_alpha(agent, scores);
    return scores;
  }

  // x_i = sum_{j != i} alpha_j * leaky_relu(V e_j)
  std::vector<double> other_agents_info(int agent, const std::vector<std::vector<double>>& embeddings,
                                        const std::vector<double>& alpha) const {
    std::vector<double> x(cfg_.embed_dim, 0.0);
    int a = 0;
    for (int j = 0; j < static_cast<int>(embeddings.size()); ++j) {
      if (j == agent) continue;
      std::vector<double> vt = mat_vec(value_, embeddings[j]);
      apply_activation(Act::leaky_relu, vt);
      for (int d = 0; d < cfg_.embed_dim; ++d) x[d] += alpha[a] * vt[d];
      ++a;
    }
    return x;
  }

  // C(e_i, x_i): the agent's head on an explicit embedding / mixed-info pair.
  double q_head_value(int agent, const std::vector<double>& e_i, const std::vector<double>& x_i) const {
    std::vector<double> in = e_i;
    in.insert(in.end(), x_i.begin(), x_i.end());
    return q_heads_[agent].forward(in)[0];
  }

  double q_value(int agent, const std::vector<Observation>& obs_all,
                 const std::vector<ActionVec>& act_all) override {
    Cache c;
    forward_joint(obs_all, act_all, c);
    return c.q_out[agent];
  }

  std::vector<double> q_all(const std::vector<Observation>& obs_all,
                            const std::vector<ActionVec>& act_all) override {
    Cache c;
    forward_joint(obs_all, act_all, c);
    return c.q_out;
  }

  double q_with_action_grad(int agent, const std::vector<Observation>& obs_all,
                            const std::vector<ActionVec>& act_all,
                            std::vector<double>& dq_daction) override {
    Cache c;
    forward_joint(obs_all, act_all, c);
    std::vector<double> dq(cfg_.n_agents, 0.0);
    dq[agent] = 1.0;
    InputGrads ig;
    backward_joint(c, dq, /*accumulate=*/false, &ig);
    dq_daction = ig.d_action[agent];
    return c.q_out[agent];
  }

  double td_loss_and_grads(std::span<const JointRow* const> rows,
                           const std::vector<std::vector<double>>& targets) override {
    if (rows.empty()) throw std::invalid_argument("td_step: empty batch");
    if (targets.size() != rows.size()) throw std::invalid_argument("td_step: target/batch size mismatch");
    zero_grads(params());
    const double inv_r = 1.0 / static_cast<double>(rows.size());
    double loss = 0.0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const JointRow& row = *rows[r];
      std::vector<Observation> obs;
      std::vector<ActionVec> act;
      for (const auto& t : row.agents) {
        obs.push_back(t.state);
        act.push_back(t.action);
      }
      Cache c;
      forward_joint(obs, act, c);
      std::vector<double> dq(cfg_.n_agents);
      for (int i = 0; i < cfg_.n_agents; ++i) {
        const double diff = c.q_out[i] - targets[r][i];
        loss += diff * diff * inv_r;
        dq[i] = 2.0 * diff * inv_r;
      }
      backward_joint(c, dq, /*accumulate=*/true, nullptr);
    }
    return loss;
  }

  double td_step(std::span<const JointRow* const> rows,
                 const std::vector<std::vector<double>>& targets) override {
    const double loss = td_loss_and_grads(rows, targets);
    opt_attention_.step(attention_params());
    ++n_attention_steps_;
    opt_value_.step(value_params());
    ++n_value_steps_;
    zero_grads(params());
    return loss;
  }

  // Attention-stage parameters (encoders and the shared maps) come first so
  // checkpoints and Polyak updates see one stable ordering.
  std::vector<ParamTensor*> params() override {
    std::vector<ParamTensor*> out = attention_params();
    for (auto* p : value_params()) out.push_back(p);
    return out;
  }

  std::vector<ParamTensor*> attention_params() {
    std::vector<ParamTensor*> out;
    for (auto& e : encoders_)
      for (auto* p : e.params()) out.push_back(p);
    out.push_back(&wk_);
    out.push_back(&wq_);
    out.push_back(&value_);
    return out;
  }

  std::vector<ParamTensor*> value_params() {
    std::vector<ParamTensor*> out;
    for (auto& h : q_heads_)
      for (auto* p : h.params()) out.push_back(p);
    return out;
  }

  std::unique_ptr<CentralCritic> clone() const override {
    return std::make_unique<AttentionCritic>(*this);
  }

 private:
  struct Cache {
    std::vector<Mlp::Cache> enc, head;
    std::vector<std::vector<double>> e, key, query, vpre, vtil;
    std::vector<std::vector<double>> alpha;    // [i][j] full square, self = 0
    std::vector<std::vector<double>> head_in;  // [e_i ; x_i]
    std::vector<double> q_out;
  };

  struct InputGrads {
    std::vector<std::vector<double>> d_obs;     // per agent, 3L
    std::vector<std::vector<double>> d_action;  // per agent, L
  };

  std::vector<double> concat_input(const Observation& obs, const ActionVec& act) const {
    if (obs.num_slices() != cfg_.n_slices || act.size() != cfg_.n_slices)
      throw std::invalid_argument("AttentionCritic: obs/action dim mismatch");
    std::vector<double> in = obs.flat();
    in.insert(in.end(), act.fractions.begin(), act.fractions.end());
    return in;
  }

  static double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  }

  static std::vector<double> mat_vec(const ParamTensor& m, const std::vector<double>& x) {
    std::vector<double> y(m.rows(), 0.0);
    for (int r = 0; r < m.rows(); ++r) {
      const double* row = &m.v[static_cast<std::size_t>(r) * m.cols()];
      double acc = 0.0;
      for (int c = 0; c < m.cols(); ++c) acc += row[c] * x[c];
      y[r] = acc;
    }
    return y;
  }

  void check_alpha(int agent, const std::vector<double>& alpha) const {
    double sum = 0.0;
    for (double a : alpha) {
      if (!(a >= 0.0)) throw std::logic_error("attention weight negative");
      sum += a;
    }
    if (!alpha.empty() && std::abs(sum - 1.0) > 1e-12)
      throw std::logic_error("attention weights do not sum to 1");
    ++n_alpha_checks_;
    if (alpha_observer_) alpha_observer_(agent, alpha);
  }

  void forward_joint(const std::vector<Observation>& obs_all, const std::vector<ActionVec>& act_all,
                     Cache& c) {
    const int n = cfg_.n_agents;
    if (static_cast<int>(obs_all.size()) != n || static_cast<int>(act_all.size()) != n)
      throw std::invalid_argument("AttentionCritic: need observations and actions for every agent");
    c.enc.resize(n);
    c.head.resize(n);
    c.e.resize(n);
    c.key.resize(n);
    c.query.resize(n);
    c.vpre.resize(n);
    c.vtil.resize(n);
    c.alpha.assign(n, std::vector<double>(n, 0.0));
    c.head_in.resize(n);
    c.q_out.assign(n, 0.0);
    if (alpha_accum_.size() != static_cast<std::size_t>(n) * n)
      alpha_accum_.assign(static_cast<std::size_t>(n) * n, 0.0);
    ++alpha_accum_count_;

    for (int j = 0; j < n; ++j) {
      c.e[j] = encoders_[j].forward(concat_input(obs_all[j], act_all[j]), &c.enc[j]);
      c.key[j] = mat_vec(wk_, c.e[j]);
      c.query[j] = mat_vec(wq_, c.e[j]);
      c.vpre[j] = mat_vec(value_, c.e[j]);
      c.vtil[j] = c.vpre[j];
      apply_activation(Act::leaky_relu, c.vtil[j]);
    }

    const double scale = 1.0 / std::sqrt(static_cast<double>(cfg_.d_attn));
    for (int i = 0; i < n; ++i) {
      std::vector<double> compact;
      compact.reserve(n - 1);
      for (int j = 0; j < n; ++j)
        if (j != i) compact.push_back(dot(c.key[j], c.query[i]) * scale);
      apply_activation(Act::softmax, compact);
      check_alpha(i, compact);

      std::vector<double> x(cfg_.embed_dim, 0.0);
      int a = 0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        c.alpha[i][j] = compact[a];
        alpha_accum_[static_cast<std::size_t>(i) * n + j] += compact[a];
        for (int d = 0; d < cfg_.embed_dim; ++d) x[d] += compact[a] * c.vtil[j][d];
        ++a;
      }

      c.head_in[i] = c.e[i];
      c.head_in[i].insert(c.head_in[i].end(), x.begin(), x.end());
      c.q_out[i] = q_heads_[i].forward(c.head_in[i], &c.head[i])[0];
    }
  }

  void backward_joint(Cache& c, const std::vector<double>& dq, bool accumulate, InputGrads* ig) {
    const int n = cfg_.n_agents;
    const int E = cfg_.embed_dim;
    const double scale = 1.0 / std::sqrt(static_cast<double>(cfg_.d_attn));

    std::vector<std::vector<double>> d_e(n, std::vector<double>(E, 0.0));
    std::vector<std::vector<double>> d_vtil(n, std::vector<double>(E, 0.0));
    std::vector<std::vector<double>> d_key(n, std::vector<double>(cfg_.d_attn, 0.0));
    std::vector<std::vector<double>> d_query(n, std::vector<double>(cfg_.d_attn, 0.0));

    for (int i = 0; i < n; ++i) {
      if (dq[i] == 0.0 && !accumulate) continue;  // nothing flows from this head
      const std::vector<double> d_head_in =
          q_heads_[i].backward(c.head[i], std::vector<double>{dq[i]}, accumulate);
      for (int d = 0; d < E; ++d) d_e[i][d] += d_head_in[d];
      std::span<const double> d_x(d_head_in.data() + E, static_cast<std::size_t>(E));

      // d alpha and softmax jacobian over j != i
      std::vector<double> d_alpha(n, 0.0);
      double dot_da_alpha = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        double s = 0.0;
        for (int d = 0; d < E; ++d) s += d_x[d] * c.vtil[j][d];
        d_alpha[j] = s;
        dot_da_alpha += d_alpha[j] * c.alpha[i][j];
        for (int d = 0; d < E; ++d) d_vtil[j][d] += c.alpha[i][j] * d_x[d];
      }
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const double d_score = c.alpha[i][j] * (d_alpha[j] - dot_da_alpha);
        for (int d = 0; d < cfg_.d_attn; ++d) {
          d_key[j][d] += d_score * c.query[i][d] * scale;
          d_query[i][d] += d_score * c.key[j][d] * scale;
        }
      }
    }

    // shared maps: value (through the rectifier), then key/query
    for (int j = 0; j < n; ++j) {
      std::vector<double> d_vpre = d_vtil[j];
      activation_backward(Act::leaky_relu, c.vtil[j], d_vpre);
      accumulate_matvec_grads(value_, c.e[j], d_vpre, d_e[j], accumulate);
      accumulate_matvec_grads(wk_, c.e[j], d_key[j], d_e[j], accumulate);
      accumulate_matvec_grads(wq_, c.e[j], d_query[j], d_e[j], accumulate);
    }

    if (ig) {
      ig->d_obs.assign(n, {});
      ig->d_action.assign(n, {});
    }
    for (int j = 0; j < n; ++j) {
      const std::vector<double> d_in = encoders_[j].backward(c.enc[j], d_e[j], accumulate);
      if (ig) {
        const int obs_dim = 3 * cfg_.n_slices;
        ig->d_obs[j].assign(d_in.begin(), d_in.begin() + obs_dim);
        ig->d_action[j].assign(d_in.begin() + obs_dim, d_in.end());
      }
    }
  }

  // dY = d(m x); accumulates m.g += dY outer x and d_x += m^T dY.
  static void accumulate_matvec_grads(ParamTensor& m, const std::vector<double>& x,
                                      const std::vector<double>& d_y, std::vector<double>& d_x,
                                      bool accumulate) {
    for (int r = 0; r < m.rows(); ++r) {
      const double dy = d_y[r];
      if (dy == 0.0) continue;
      double* grow = &m.g[static_cast<std::size_t>(r) * m.cols()];
      const double* vrow = &m.v[static_cast<std::size_t>(r) * m.cols()];
      for (int cidx = 0; cidx < m.cols(); ++cidx) {
        if (accumulate) grow[cidx] += dy * x[cidx];
        d_x[cidx] += vrow[cidx] * dy;
      }
    }
  }

  AttentionCriticConfig cfg_;
  std::vector<Mlp> encoders_;
  std::vector<Mlp> q_heads_;
  ParamTensor wk_, wq_, value_;
  Adam opt_attention_, opt_value_;
  long n_attention_steps_ = 0;
  long n_value_steps_ = 0;
  mutable long n_alpha_checks_ = 0;
  std::vector<double> alpha_accum_;
  long alpha_accum_count_ = 0;
  std::function<void(int, const std::vector<double>&)> alpha_observer_;
};

}  // namespace slicelab
