// One DU's downlink world: channel draws, random-waypoint mobility,
// on/off traffic, URLLC queues, and the per-step QoS aggregation.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "slicelab/radio/channel.hpp"
#include "slicelab/radio/qos.hpp"
#include "slicelab/radio/types.hpp"
#include "slicelab/rng.hpp"

namespace slicelab {

// Per-slice traffic dynamics. Activity for throughput / connection_density
// slices follows an on/off chain driven by Poisson session events; max_delay
// slices are active exactly while their queue is non-empty.
struct TrafficConfig {
  std::vector<double> session_on_rate_per_s;   // per slice, inactive -> active
  std::vector<double> session_off_rate_per_s;  // per slice, active -> inactive
  double packet_rate_per_s = 2.0;              // max_delay slices, per UE
};

struct EnvConfig {
  RadioConfig radio;
  std::vector<SliceSpec> slices;
  TrafficConfig traffic;
  std::vector<int> populations;  // UEs per slice, same order as `slices`

  int total_ues() const {
    int n = 0;
    for (int p : populations) n += p;
    return n;
  }

  void validate() const {
    radio.validate();
    if (slices.empty()) throw std::invalid_argument("EnvConfig: no slices");
    if (populations.size() != slices.size())
      throw std::invalid_argument("EnvConfig: populations/slices size mismatch");
    if (traffic.session_on_rate_per_s.size() != slices.size() ||
        traffic.session_off_rate_per_s.size() != slices.size())
      throw std::invalid_argument("EnvConfig: traffic rates must have one entry per slice");
    for (const auto& s : slices) s.validate();
  }
};

class RadioEnv {
 public:
  RadioEnv(EnvConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)), rng_(seed) {
    cfg_.validate();
    cfg_.radio.finalize();
    reset();
  }

  int num_slices() const { return static_cast<int>(cfg_.slices.size()); }
  const EnvConfig& config() const { return cfg_; }
  const std::vector<UEState>& ues() const { return ues_; }
  const std::vector<int>& ue_slice_ids() const { return ue_slice_; }

  std::vector<int> active_counts() const {
    std::vector<int> c(num_slices(), 0);
    for (const auto& u : ues_)
      if (u.active) ++c[u.slice_id];
    return c;
  }

  // Re-draws positions and activity from the environment's stream; queues
  // and waypoints start empty/fresh.
  void reset() {
    const int n = cfg_.total_ues();
    ues_.clear();
    ues_.reserve(n);
    ue_slice_.clear();
    waypoint_x_.assign(n, 0.0);
    waypoint_y_.assign(n, 0.0);
    int id = 0;
    for (std::size_t l = 0; l < cfg_.slices.size(); ++l) {
      for (int i = 0; i < cfg_.populations[l]; ++i) {
        UEState ue;
        ue.ue_id = id;
        ue.slice_id = cfg_.slices[l].slice_id;
        place_uniform(ue);
        ue.active = cfg_.slices[l].qos_kind == QosKind::max_delay ? true : rng_.bernoulli(0.5);
        ue.queue_bits = 0.0;
        ue_slice_.push_back(ue.slice_id);
        ues_.push_back(ue);
        draw_waypoint(id);
        ++id;
      }
    }
  }

  // Advances slots_per_step slots under a fixed allocation. Per slot, in
  // order: sample channel, compute rates, drain queues, admit packet
  // arrivals, update activity, move UEs.
  QoSReport step(const Allocation& alloc) {
    const RadioConfig& rc = cfg_.radio;
    SlotWindow window;
    window.ue_slice = ue_slice_;
    window.rates_bps.reserve(rc.slots_per_step);

    for (int t = 0; t < rc.slots_per_step; ++t) {
      const ChannelState ch = sample_channel(rc, ues_, rng_);

      std::vector<double> slot_rates(ues_.size(), 0.0);
      for (int l = 0; l < num_slices(); ++l) {
        const SliceRate r = slice_rate(rc, ch, alloc, ues_, l);
        for (std::size_t n = 0; n < ues_.size(); ++n) slot_rates[n] += r.per_ue_bps[n];
      }
      window.rates_bps.push_back(slot_rates);

      // queue service then arrivals, so an arrival sees the post-drain backlog
      for (std::size_t n = 0; n < ues_.size(); ++n) {
        UEState& ue = ues_[n];
        const SliceSpec& spec = slice_of(ue);
        if (spec.qos_kind != QosKind::max_delay) continue;
        ue.queue_bits = std::max(0.0, ue.queue_bits - slot_rates[n] * rc.slot_duration_s);
        const int n_pkts = rng_.poisson(cfg_.traffic.packet_rate_per_s * rc.slot_duration_s);
        for (int p = 0; p < n_pkts; ++p) {
          const double bits = rng_.exponential(spec.packet_mean_bits);
          window.arrivals.push_back({t, static_cast<int>(n), bits, ue.queue_bits});
          ue.queue_bits += bits;
        }
      }

      // activity: one draw per UE per slot regardless of state, so the
      // stream consumption does not depend on the trajectory. Delay-slice
      // UEs hold their bearers (packets arrive at any time), so they stay
      // schedulable.
      for (auto& ue : ues_) {
        const SliceSpec& spec = slice_of(ue);
        const double u = rng_.uniform01();
        if (spec.qos_kind == QosKind::max_delay) {
          ue.active = true;
        } else {
          const int l = slice_index(ue.slice_id);
          const double p_on = 1.0 - std::exp(-cfg_.traffic.session_on_rate_per_s[l] * rc.slot_duration_s);
          const double p_off = 1.0 - std::exp(-cfg_.traffic.session_off_rate_per_s[l] * rc.slot_duration_s);
          ue.active = ue.active ? !(u < p_off) : (u < p_on);
        }
      }

      move_ues();
    }
    return qos_metrics(rc, cfg_.slices, window);
  }

 private:
  const SliceSpec& slice_of(const UEState& ue) const { return cfg_.slices[slice_index(ue.slice_id)]; }

  int slice_index(int slice_id) const {
    for (std::size_t l = 0; l < cfg_.slices.size(); ++l)
      if (cfg_.slices[l].slice_id == slice_id) return static_cast<int>(l);
    throw std::logic_error("RadioEnv: unknown slice id");
  }

  void place_uniform(UEState& ue) {
    const double r = cfg_.radio.cell_radius_m * std::sqrt(rng_.uniform01());
    const double ang = 2.0 * M_PI * rng_.uniform01();
    ue.pos_x_m = r * std::cos(ang);
    ue.pos_y_m = r * std::sin(ang);
    ue.distance_m = std::max(kMinDistanceM, std::hypot(ue.pos_x_m, ue.pos_y_m));
  }

  void draw_waypoint(int n) {
    const double r = cfg_.radio.cell_radius_m * std::sqrt(rng_.uniform01());
    const double ang = 2.0 * M_PI * rng_.uniform01();
    waypoint_x_[n] = r * std::cos(ang);
    waypoint_y_[n] = r * std::sin(ang);
  }

  void move_ues() {
    const double speed = cfg_.radio.ue_speed_mps;
    if (speed <= 0.0) return;
    const double stride = speed * cfg_.radio.slot_duration_s;
    for (std::size_t n = 0; n < ues_.size(); ++n) {
      UEState& ue = ues_[n];
      double dx = waypoint_x_[n] - ue.pos_x_m;
      double dy = waypoint_y_[n] - ue.pos_y_m;
      const double dist = std::hypot(dx, dy);
      if (dist <= stride) {
        ue.pos_x_m = waypoint_x_[n];
        ue.pos_y_m = waypoint_y_[n];
        draw_waypoint(static_cast<int>(n));
      } else {
        ue.pos_x_m += dx / dist * stride;
        ue.pos_y_m += dy / dist * stride;
      }
      // waypoints live inside the disk, so this only guards rounding
      const double r = std::hypot(ue.pos_x_m, ue.pos_y_m);
      if (r > cfg_.radio.cell_radius_m) {
        ue.pos_x_m *= cfg_.radio.cell_radius_m / r;
        ue.pos_y_m *= cfg_.radio.cell_radius_m / r;
      }
      ue.distance_m = std::max(kMinDistanceM, std::hypot(ue.pos_x_m, ue.pos_y_m));
    }
  }

  EnvConfig cfg_;
  RngStream rng_;
  std::vector<UEState> ues_;
  std::vector<int> ue_slice_;
  std::vector<double> waypoint_x_, waypoint_y_;
};

}  // namespace slicelab
