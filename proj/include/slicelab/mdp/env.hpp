// The RL-facing environment interface and the adapter that wraps one DU's
// radio world into it.
#pragma once

#include <memory>
#include <vector>

#include "slicelab/mdp/encode.hpp"
#include "slicelab/mdp/scheduler.hpp"
#include "slicelab/mdp/types.hpp"
#include "slicelab/radio/environment.hpp"

namespace slicelab {

struct StepOut {
  Observation next;
  double reward = 0.0;
  QoSReport qos;
};

class EnvBase {
 public:
  virtual ~EnvBase() = default;
  virtual int num_slices() const = 0;
  virtual Observation reset() = 0;
  virtual StepOut step(const ActionVec& action) = 0;
  virtual const std::vector<int>& ue_slice_ids() const = 0;
};

class MdpEnv : public EnvBase {
 public:
  MdpEnv(EnvConfig cfg, std::uint64_t seed) : radio_(std::move(cfg), seed) {}

  int num_slices() const override { return radio_.num_slices(); }
  const std::vector<int>& ue_slice_ids() const override { return radio_.ue_slice_ids(); }
  const RadioEnv& radio() const { return radio_; }

  Observation reset() override {
    radio_.reset();
    prev_action_ = ActionVec::zeros(num_slices());
    QoSReport blank;
    blank.per_slice_value.assign(num_slices(), 0.0);
    blank.per_slice_satisfied_fraction.assign(num_slices(), 0.0);
    return encode_state(blank, radio_.config().slices, radio_.active_counts(),
                        radio_.config().total_ues(), prev_action_);
  }

  StepOut step(const ActionVec& action) override {
    const Allocation alloc =
        action_to_allocation(action, radio_.config().radio.total_rbs, radio_.ues());
    StepOut out;
    out.qos = radio_.step(alloc);
    out.reward = compute_reward(out.qos);
    prev_action_ = action;
    out.next = encode_state(out.qos, radio_.config().slices, radio_.active_counts(),
                            radio_.config().total_ues(), prev_action_);
    return out;
  }

 private:
  RadioEnv radio_;
  ActionVec prev_action_;
};

}  // namespace slicelab
