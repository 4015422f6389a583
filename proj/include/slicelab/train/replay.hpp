// FIFO ring of joint transitions with uniform without-replacement sampling.
#pragma once

#include <algorithm>
#include <set>
#include <stdexcept>
#include <vector>

#include "slicelab/agent/actor.hpp"
#include "slicelab/rng.hpp"

namespace slicelab {

class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("ReplayBuffer: capacity must be > 0");
  }

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return rows_.size(); }
  std::size_t total_appended() const { return total_; }

  void append(JointRow row) {
    if (rows_.size() < capacity_) {
      rows_.push_back(std::move(row));
    } else {
      rows_[head_] = std::move(row);  // overwrite the oldest
      head_ = (head_ + 1) % capacity_;
    }
    ++total_;
  }

  // Row by age: 0 is the oldest currently held.
  const JointRow& by_age(std::size_t i) const {
    if (i >= rows_.size()) throw std::out_of_range("ReplayBuffer: index");
    return rows_[(head_ + i) % rows_.size()];
  }

  // k distinct rows chosen uniformly (Floyd's algorithm), returned in
  // ascending age order so batch composition is deterministic.
  std::vector<const JointRow*> sample(std::size_t k, RngStream& rng) const {
    if (k > rows_.size()) throw std::invalid_argument("ReplayBuffer: sample larger than buffer");
    std::set<std::size_t> chosen;
    for (std::size_t i = rows_.size() - k; i < rows_.size(); ++i) {
      const std::size_t j = rng.uniform_index(i + 1);
      if (!chosen.insert(j).second) chosen.insert(i);
    }
    std::vector<const JointRow*> out;
    out.reserve(k);
    for (std::size_t idx : chosen) out.push_back(&by_age(idx));
    return out;
  }

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // oldest element once full
  std::size_t total_ = 0;
  std::vector<JointRow> rows_;
};

}  // namespace slicelab
