// State encoding and the reward of the slice-management MDP.
#pragma once

#include <stdexcept>
#include <vector>

#include "slicelab/mdp/types.hpp"
#include "slicelab/radio/types.hpp"

namespace slicelab {

// Builds the observation from a QoS report. Q values are normalized by the
// slice's lambda target (all kinds), densities by the DU population, and the
// previous action is copied verbatim. Normalized QoS may exceed 1; no clamp.
inline Observation encode_state(const QoSReport& qos, const std::vector<SliceSpec>& slices,
                                const std::vector<int>& slice_counts, int du_population,
                                const ActionVec& prev_action) {
  const int L = static_cast<int>(slices.size());
  if (static_cast<int>(qos.per_slice_value.size()) != L ||
      static_cast<int>(slice_counts.size()) != L || prev_action.size() != L)
    throw std::invalid_argument("encode_state: per-slice inputs must all have L entries");

  Observation obs = Observation::zeros(L);
  for (int l = 0; l < L; ++l) {
    obs.qos_values[l] = qos.per_slice_value[l] / slices[l].lambda_target;
    obs.ue_density[l] =
        du_population > 0 ? static_cast<double>(slice_counts[l]) / du_population : 0.0;
    obs.prev_action[l] = prev_action.fractions[l];
  }
  return obs;
}

// r_t = sum_l P(|Q_l - lambda_l| <= eps_l), estimated per step window.
// Bounded in [0, L] by construction.
inline double compute_reward(const QoSReport& qos) {
  double r = 0.0;
  for (double f : qos.per_slice_satisfied_fraction) {
    if (f < 0.0 || f > 1.0) throw std::logic_error("compute_reward: satisfied fraction outside [0,1]");
    r += f;
  }
  return r;
}

}  // namespace slicelab
