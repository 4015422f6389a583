// Fully-connected stacks with exact reverse-mode gradients.
#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "slicelab/nn/tensor.hpp"
#include "slicelab/rng.hpp"

namespace slicelab {

enum class Act { identity, tanh_fn, leaky_relu, softmax };

// Negative-side slope of the leaky rectifier. The subgradient at exactly 0
// is defined as this slope.
inline constexpr double kLeakySlope = 0.01;

inline void apply_activation(Act act, std::vector<double>& x) {
  switch (act) {
    case Act::identity:
      return;
    case Act::tanh_fn:
      for (double& v : x) v = std::tanh(v);
      return;
    case Act::leaky_relu:
      for (double& v : x)
        if (v < 0.0) v *= kLeakySlope;
      return;
    case Act::softmax: {
      double mx = x.empty() ? 0.0 : x[0];
      for (double v : x) mx = std::max(mx, v);
      double sum = 0.0;
      for (double& v : x) {
        v = std::exp(v - mx);
        sum += v;
      }
      for (double& v : x) v /= sum;
      return;
    }
  }
}

// dPre from dOut given the activation outputs of the layer.
inline void activation_backward(Act act, const std::vector<double>& out, std::vector<double>& d) {
  switch (act) {
    case Act::identity:
      return;
    case Act::tanh_fn:
      for (std::size_t i = 0; i < d.size(); ++i) d[i] *= 1.0 - out[i] * out[i];
      return;
    case Act::leaky_relu:
      // sign(out) == sign(pre); out == 0 takes the negative-side slope
      for (std::size_t i = 0; i < d.size(); ++i) d[i] *= out[i] > 0.0 ? 1.0 : kLeakySlope;
      return;
    case Act::softmax: {
      double dot = 0.0;
      for (std::size_t i = 0; i < d.size(); ++i) dot += d[i] * out[i];
      for (std::size_t i = 0; i < d.size(); ++i) d[i] = out[i] * (d[i] - dot);
      return;
    }
  }
}

struct MLPSpec {
  std::vector<int> layer_widths;  // including the input width; >= 2 entries
  Act hidden = Act::tanh_fn;
  Act output = Act::identity;

  void validate() const {
    if (layer_widths.size() < 2) throw std::invalid_argument("MLPSpec: need at least one layer");
    for (int w : layer_widths)
      if (w <= 0) throw std::invalid_argument("MLPSpec: widths must be > 0");
  }

  int input_dim() const { return layer_widths.front(); }
  int output_dim() const { return layer_widths.back(); }
  int num_layers() const { return static_cast<int>(layer_widths.size()) - 1; }
};

class Mlp {
 public:
  // Per-layer activation outputs plus the input; enough for exact backprop.
  struct Cache {
    std::vector<std::vector<double>> acts;  // acts[0] = input, acts[i] = layer i output
    bool valid = false;
  };

  Mlp() = default;
  Mlp(MLPSpec spec, const std::string& name_prefix) : spec_(std::move(spec)) {
    spec_.validate();
    for (int i = 0; i < spec_.num_layers(); ++i) {
      weights_.emplace_back(name_prefix + ".w" + std::to_string(i),
                            std::vector<int>{spec_.layer_widths[i + 1], spec_.layer_widths[i]});
      biases_.emplace_back(name_prefix + ".b" + std::to_string(i),
                           std::vector<int>{spec_.layer_widths[i + 1]});
    }
  }

  const MLPSpec& spec() const { return spec_; }

  // Uniform fan-in scaling; biases start at zero.
  void init(RngStream& rng) {
    for (auto& w : weights_) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(w.cols()));
      for (double& v : w.v) v = rng.uniform(-bound, bound);
    }
    for (auto& b : biases_) std::fill(b.v.begin(), b.v.end(), 0.0);
  }

  std::vector<double> forward(std::span<const double> input, Cache* cache = nullptr) const {
    if (static_cast<int>(input.size()) != spec_.input_dim())
      throw std::invalid_argument("Mlp::forward: input dim " + std::to_string(input.size()) +
                                  " != " + std::to_string(spec_.input_dim()));
    std::vector<double> x(input.begin(), input.end());
    if (cache) {
      cache->acts.clear();
      cache->acts.push_back(x);
    }
    for (int i = 0; i < spec_.num_layers(); ++i) {
      const ParamTensor& w = weights_[i];
      const ParamTensor& b = biases_[i];
      std::vector<double> y(w.rows());
      for (int r = 0; r < w.rows(); ++r) {
        double acc = b.v[r];
        const double* wr = &w.v[static_cast<std::size_t>(r) * w.cols()];
        for (int c = 0; c < w.cols(); ++c) acc += wr[c] * x[c];
        y[r] = acc;
      }
      apply_activation(i + 1 == spec_.num_layers() ? spec_.output : spec_.hidden, y);
      x = std::move(y);
      if (cache) cache->acts.push_back(x);
    }
    if (cache) cache->valid = true;
    return x;
  }

  // Backpropagates d(loss)/d(output); returns d(loss)/d(input). Parameter
  // gradients accumulate into the tensors unless accumulate == false.
  std::vector<double> backward(const Cache& cache, std::span<const double> d_out,
                               bool accumulate = true) {
    if (!cache.valid || cache.acts.size() != static_cast<std::size_t>(spec_.num_layers()) + 1)
      throw std::logic_error("Mlp::backward: missing or stale forward cache");
    if (static_cast<int>(d_out.size()) != spec_.output_dim())
      throw std::invalid_argument("Mlp::backward: gradient dim mismatch");

    std::vector<double> d(d_out.begin(), d_out.end());
    for (int i = spec_.num_layers() - 1; i >= 0; --i) {
      activation_backward(i + 1 == spec_.num_layers() ? spec_.output : spec_.hidden, cache.acts[i + 1], d);
      ParamTensor& w = weights_[i];
      ParamTensor& b = biases_[i];
      const std::vector<double>& in = cache.acts[i];
      if (accumulate) {
        for (int r = 0; r < w.rows(); ++r) {
          double* gr = &w.g[static_cast<std::size_t>(r) * w.cols()];
          for (int c = 0; c < w.cols(); ++c) gr[c] += d[r] * in[c];
          b.g[r] += d[r];
        }
      }
      std::vector<double> d_in(w.cols(), 0.0);
      for (int r = 0; r < w.rows(); ++r) {
        const double* wr = &w.v[static_cast<std::size_t>(r) * w.cols()];
        for (int c = 0; c < w.cols(); ++c) d_in[c] += wr[c] * d[r];
      }
      d = std::move(d_in);
    }
    return d;
  }

  std::vector<ParamTensor*> params() {
    std::vector<ParamTensor*> out;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      out.push_back(&weights_[i]);
      out.push_back(&biases_[i]);
    }
    return out;
  }

 private:
  MLPSpec spec_;
  std::vector<ParamTensor> weights_;
  std::vector<ParamTensor> biases_;
};

}  // namespace slicelab
