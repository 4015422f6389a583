// MDP tuple elements exchanged between the environment and the agents.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace slicelab {

// Fixed layout [qos_values | ue_density | prev_action], dimension 3L.
struct Observation {
  std::vector<double> qos_values;
  std::vector<double> ue_density;
  std::vector<double> prev_action;

  int num_slices() const { return static_cast<int>(qos_values.size()); }
  int dim() const { return 3 * num_slices(); }

  std::vector<double> flat() const {
    std::vector<double> v;
    v.reserve(dim());
    v.insert(v.end(), qos_values.begin(), qos_values.end());
    v.insert(v.end(), ue_density.begin(), ue_density.end());
    v.insert(v.end(), prev_action.begin(), prev_action.end());
    return v;
  }

  bool finite() const {
    for (double x : flat())
      if (!std::isfinite(x)) return false;
    return true;
  }

  static Observation zeros(int L) {
    Observation o;
    o.qos_values.assign(L, 0.0);
    o.ue_density.assign(L, 0.0);
    o.prev_action.assign(L, 0.0);
    return o;
  }
};

// Requested RB fraction per slice, each in [0,1]. Feasibility (sum <= 1) is
// enforced by the scheduler projection, not here.
struct ActionVec {
  std::vector<double> fractions;

  int size() const { return static_cast<int>(fractions.size()); }

  void validate() const {
    for (double f : fractions)
      if (!(f >= 0.0 && f <= 1.0))
        throw std::invalid_argument("ActionVec: fractions must lie in [0,1]");
  }

  static ActionVec zeros(int L) { return ActionVec{std::vector<double>(L, 0.0)}; }
};

struct Transition {
  Observation state;
  ActionVec action;
  double reward = 0.0;
  Observation next_state;
  int agent_id = 0;
};

}  // namespace slicelab
