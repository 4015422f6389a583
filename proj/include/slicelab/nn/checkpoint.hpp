// Parameter archive: a textual format mapping tensor names to shape and
// row-major values. Doubles are stored as their raw 64-bit pattern in hex,
// so load(save(x)) is bit-exact.
//
//   slicelab-params 1
//   tensor <name> <ndims> <d0> <d1> ...
//   <hex64> <hex64> ... (16 per line)
#pragma once

#include <bit>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "slicelab/nn/tensor.hpp"

namespace slicelab {

inline void save_checkpoint(std::ostream& out, const std::vector<const ParamTensor*>& params) {
  out << "slicelab-params 1\n";
  for (const auto* p : params) {
    out << "tensor " << p->name << ' ' << p->shape.size();
    for (int d : p->shape) out << ' ' << d;
    out << '\n';
    char buf[20];
    for (std::size_t i = 0; i < p->v.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%016llx",
                    static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(p->v[i])));
      out << buf << ((i + 1) % 16 == 0 || i + 1 == p->v.size() ? '\n' : ' ');
    }
  }
}

inline void save_checkpoint(const std::string& path, const std::vector<const ParamTensor*>& params) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("save_checkpoint: cannot open " + path);
  save_checkpoint(f, params);
}

inline std::map<std::string, ParamTensor> load_checkpoint(std::istream& in) {
  std::string header;
  std::getline(in, header);
  if (header != "slicelab-params 1")
    throw std::runtime_error("load_checkpoint: unrecognized header '" + header + "'");
  std::map<std::string, ParamTensor> out;
  std::string tok;
  while (in >> tok) {
    if (tok != "tensor") throw std::runtime_error("load_checkpoint: expected 'tensor', got '" + tok + "'");
    std::string name;
    std::size_t ndims = 0;
    in >> name >> ndims;
    std::vector<int> shape(ndims);
    for (auto& d : shape) in >> d;
    ParamTensor t(name, shape);
    for (std::size_t i = 0; i < t.size(); ++i) {
      std::string hex;
      if (!(in >> hex)) throw std::runtime_error("load_checkpoint: truncated values for " + name);
      t.v[i] = std::bit_cast<double>(static_cast<std::uint64_t>(std::stoull(hex, nullptr, 16)));
    }
    out.emplace(name, std::move(t));
  }
  return out;
}

inline std::map<std::string, ParamTensor> load_checkpoint(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("load_checkpoint: cannot open " + path);
  return load_checkpoint(f);
}

// Copies archived values into live tensors, matching by name and shape.
inline void restore_params(const std::map<std::string, ParamTensor>& archive,
                           const std::vector<ParamTensor*>& params) {
  for (auto* p : params) {
    auto it = archive.find(p->name);
    if (it == archive.end()) throw std::runtime_error("restore_params: missing tensor " + p->name);
    if (it->second.shape != p->shape) throw std::runtime_error("restore_params: shape mismatch for " + p->name);
    p->v = it->second.v;
  }
}

}  // namespace slicelab
