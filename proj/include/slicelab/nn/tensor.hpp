// Named parameter tensors with value and gradient storage.
#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace slicelab {

struct ParamTensor {
  std::string name;
  std::vector<int> shape;
  std::vector<double> v;
  std::vector<double> g;

  ParamTensor() = default;
  ParamTensor(std::string name_, std::vector<int> shape_) : name(std::move(name_)), shape(std::move(shape_)) {
    std::size_t n = 1;
    for (int d : shape) {
      if (d <= 0) throw std::invalid_argument("ParamTensor: nonpositive dimension");
      n *= static_cast<std::size_t>(d);
    }
    v.assign(n, 0.0);
    g.assign(n, 0.0);
  }

  std::size_t size() const { return v.size(); }
  int rows() const { return shape.empty() ? 0 : shape[0]; }
  int cols() const { return shape.size() < 2 ? 1 : shape[1]; }

  void zero_grad() { std::fill(g.begin(), g.end(), 0.0); }

  bool grads_finite() const {
    for (double x : g)
      if (!std::isfinite(x)) return false;
    return true;
  }
};

inline void zero_grads(const std::vector<ParamTensor*>& params) {
  for (auto* p : params) p->zero_grad();
}

inline std::size_t param_count(const std::vector<ParamTensor*>& params) {
  std::size_t n = 0;
  for (auto* p : params) n += p->size();
  return n;
}

// FNV-1a over the raw value bytes; used by tests to prove parameters were
// not touched by an update that must not touch them.
inline std::uint64_t hash_values(const std::vector<ParamTensor*>& params) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto* p : params) mix(p->v.data(), p->v.size() * sizeof(double));
  return h;
}

}  // namespace slicelab
