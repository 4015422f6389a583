// Adam with bias correction, and Polyak target tracking.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "slicelab/nn/tensor.hpp"

namespace slicelab {

class Adam {
 public:
  explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  double learning_rate() const { return lr_; }
  void set_learning_rate(double lr) { lr_ = lr; }
  long step_count() const { return t_; }

  // One update over the given tensors. Refuses the whole step if any
  // gradient is non-finite, leaving parameters and moments untouched.
  void step(const std::vector<ParamTensor*>& params) {
    for (const auto* p : params)
      if (!p->grads_finite())
        throw std::runtime_error("Adam: non-finite gradient in '" + p->name + "', step refused");
    if (m_.empty()) {
      for (const auto* p : params) {
        m_.emplace_back(p->size(), 0.0);
        v_.emplace_back(p->size(), 0.0);
      }
    } else if (m_.size() != params.size()) {
      throw std::logic_error("Adam: parameter group changed size");
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      ParamTensor& p = *params[i];
      if (m_[i].size() != p.size()) throw std::logic_error("Adam: tensor size changed");
      for (std::size_t j = 0; j < p.size(); ++j) {
        const double g = p.g[j];
        m_[i][j] = beta1_ * m_[i][j] + (1.0 - beta1_) * g;
        v_[i][j] = beta2_ * v_[i][j] + (1.0 - beta2_) * g * g;
        p.v[j] -= lr_ * (m_[i][j] / bc1) / (std::sqrt(v_[i][j] / bc2) + eps_);
      }
    }
  }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

// target <- (1 - mix) * target + mix * online
inline void polyak_update(const std::vector<ParamTensor*>& target,
                          const std::vector<ParamTensor*>& online, double mix) {
  if (!(mix > 0.0 && mix <= 1.0)) throw std::invalid_argument("polyak_update: mix must be in (0,1]");
  if (target.size() != online.size()) throw std::invalid_argument("polyak_update: group size mismatch");
  for (std::size_t i = 0; i < target.size(); ++i) {
    ParamTensor& t = *target[i];
    const ParamTensor& o = *online[i];
    if (t.shape != o.shape) throw std::invalid_argument("polyak_update: shape mismatch at '" + t.name + "'");
    for (std::size_t j = 0; j < t.size(); ++j) t.v[j] = (1.0 - mix) * t.v[j] + mix * o.v[j];
  }
}

}  // namespace slicelab
