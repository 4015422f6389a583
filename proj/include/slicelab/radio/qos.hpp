// Per-slice QoS aggregation over one step window.
#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "slicelab/radio/types.hpp"

namespace slicelab {

// A packet arrival event inside the window (max_delay slices). The queue
// backlog is captured at the arrival instant, before the packet is added.
struct PacketArrival {
  int slot = 0;
  int ue = 0;
  double bits = 0.0;
  double queue_bits_at_arrival = 0.0;
};

// Everything qos_metrics needs about one step window: the per-slot per-UE
// rates, the UE to slice map, and the packet arrivals seen by delay slices.
struct SlotWindow {
  std::vector<std::vector<double>> rates_bps;  // [slot][ue]
  std::vector<int> ue_slice;
  std::vector<PacketArrival> arrivals;
};

// Per-slot slice values:
//   throughput          mean rate over the slice's UEs
//   connection_density  count of slice UEs at or above the configured minimum rate
//   max_delay           max estimated delay of packets arriving that slot (0 if none)
// Packet delay = (backlog at arrival + packet bits) / rate at arrival, capped
// at the window duration; a zero-rate UE contributes the cap, not infinity.
//
// Step-level Q_l uses the window aggregate (window-mean throughput, count of
// UEs by window-mean rate, window max delay); the satisfied fraction is the
// share of slots with |Q_l(slot) - lambda_l| <= epsilon_l.
inline QoSReport qos_metrics(const RadioConfig& cfg, const std::vector<SliceSpec>& slices,
                             const SlotWindow& w) {
  const int n_slots = static_cast<int>(w.rates_bps.size());
  if (n_slots != cfg.slots_per_step)
    throw std::invalid_argument("qos_metrics: window length != slots_per_step");
  const int n_ues = static_cast<int>(w.ue_slice.size());
  for (const auto& slot : w.rates_bps)
    if (static_cast<int>(slot.size()) != n_ues)
      throw std::invalid_argument("qos_metrics: ragged rate window");

  const int L = static_cast<int>(slices.size());
  const double delay_cap_s = cfg.slots_per_step * cfg.slot_duration_s;

  // window-mean rate per UE
  std::vector<double> mean_rate(n_ues, 0.0);
  for (const auto& slot : w.rates_bps)
    for (int n = 0; n < n_ues; ++n) mean_rate[n] += slot[n];
  for (auto& r : mean_rate) r /= n_slots;

  // delay per arrival, grouped by slot, keeping the source UE for slice filtering
  std::vector<std::vector<std::pair<int, double>>> slot_delays(n_slots);
  for (const auto& p : w.arrivals) {
    if (p.slot < 0 || p.slot >= n_slots || p.ue < 0 || p.ue >= n_ues)
      throw std::invalid_argument("qos_metrics: arrival outside window");
    const double rate = w.rates_bps[p.slot][p.ue];
    const double delay =
        rate > 0.0 ? std::min((p.queue_bits_at_arrival + p.bits) / rate, delay_cap_s) : delay_cap_s;
    slot_delays[p.slot].emplace_back(p.ue, delay);
  }

  QoSReport rep;
  rep.per_slice_value.assign(L, 0.0);
  rep.per_slice_satisfied_fraction.assign(L, 0.0);
  rep.per_user_throughput_bps = mean_rate;

  for (int l = 0; l < L; ++l) {
    const SliceSpec& spec = slices[l];
    std::vector<int> members;
    for (int n = 0; n < n_ues; ++n)
      if (w.ue_slice[n] == spec.slice_id) members.push_back(n);

    double q_window = 0.0;
    int satisfied = 0;
    for (int t = 0; t < n_slots; ++t) {
      double q_slot = 0.0;
      switch (spec.qos_kind) {
        case QosKind::throughput: {
          for (int n : members) q_slot += w.rates_bps[t][n];
          if (!members.empty()) q_slot /= static_cast<double>(members.size());
          break;
        }
        case QosKind::connection_density: {
          for (int n : members)
            if (w.rates_bps[t][n] >= spec.mtc_min_rate_bps) q_slot += 1.0;
          break;
        }
        case QosKind::max_delay: {
          for (const auto& [ue, d] : slot_delays[t])
            if (w.ue_slice[ue] == spec.slice_id) q_slot = std::max(q_slot, d);
          break;
        }
      }
      if (std::abs(q_slot - spec.lambda_target) <= spec.epsilon_margin) ++satisfied;
    }
    rep.per_slice_satisfied_fraction[l] = static_cast<double>(satisfied) / n_slots;

    switch (spec.qos_kind) {
      case QosKind::throughput: {
        for (int n : members) q_window += mean_rate[n];
        if (!members.empty()) q_window /= static_cast<double>(members.size());
        break;
      }
      case QosKind::connection_density: {
        for (int n : members)
          if (mean_rate[n] >= spec.mtc_min_rate_bps) q_window += 1.0;
        break;
      }
      case QosKind::max_delay: {
        for (const auto& ds : slot_delays)
          for (const auto& [ue, d] : ds)
            if (w.ue_slice[ue] == spec.slice_id) q_window = std::max(q_window, d);
        break;
      }
    }
    rep.per_slice_value[l] = q_window;
  }
  return rep;
}

}  // namespace slicelab
