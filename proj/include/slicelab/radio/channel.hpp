// Rayleigh fading channel sampling and the per-slot OFDMA slice rate.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "slicelab/radio/types.hpp"
#include "slicelab/rng.hpp"

namespace slicelab {

// UEs never get closer to a transmitter than this; keeps d^-eta bounded.
inline constexpr double kMinDistanceM = 1.0;

// Neighbor O-RUs sit on a ring of radius 2 * cell_radius around the serving
// O-RU, at equally spaced angles.
inline std::vector<std::pair<double, double>> neighbor_positions(const RadioConfig& cfg) {
  std::vector<std::pair<double, double>> pos;
  pos.reserve(cfg.neighbor_count);
  for (int m = 0; m < cfg.neighbor_count; ++m) {
    const double ang = 2.0 * M_PI * m / std::max(1, cfg.neighbor_count);
    pos.emplace_back(2.0 * cfg.cell_radius_m * std::cos(ang), 2.0 * cfg.cell_radius_m * std::sin(ang));
  }
  return pos;
}

// Draws one slot of channel state. Gains are |h|^2 of a unit-variance
// complex Gaussian, i.e. exponential with mean 1. Interference per (UE, RB)
// sums p_u * d_m^-eta * |h|^2 over the neighbor RUs active on that RB.
//
// Draw order (part of the determinism contract): neighbor activity per
// (neighbor, RB), then serving gains per (UE, RB), then interference fading
// per (UE, RB, active neighbor).
inline ChannelState sample_channel(const RadioConfig& cfg, const std::vector<UEState>& ues,
                                   RngStream& rng) {
  if (!cfg.finalized()) throw std::logic_error("sample_channel: RadioConfig not finalized");
  for (const auto& ue : ues) {
    if (!std::isfinite(ue.distance_m) || !std::isfinite(ue.pos_x_m) || !std::isfinite(ue.pos_y_m))
      throw std::invalid_argument("sample_channel: non-finite UE position/distance");
  }

  ChannelState ch;
  ch.n_ues = static_cast<int>(ues.size());
  ch.n_rbs = cfg.total_rbs;
  ch.gains.assign(static_cast<std::size_t>(ch.n_ues) * ch.n_rbs, 0.0);
  ch.interference_mw.assign(static_cast<std::size_t>(ch.n_ues) * ch.n_rbs, 0.0);
  if (ues.empty()) return ch;

  const int M = cfg.neighbor_count;
  std::vector<std::uint8_t> active(static_cast<std::size_t>(std::max(M, 1)) * cfg.total_rbs, 0);
  for (int m = 0; m < M; ++m)
    for (int k = 0; k < cfg.total_rbs; ++k)
      active[static_cast<std::size_t>(m) * cfg.total_rbs + k] = rng.bernoulli(cfg.neighbor_activity_prob);

  for (std::size_t i = 0; i < ch.gains.size(); ++i) ch.gains[i] = rng.exponential(1.0);

  if (M > 0) {
    const auto npos = neighbor_positions(cfg);
    for (int n = 0; n < ch.n_ues; ++n) {
      for (int k = 0; k < cfg.total_rbs; ++k) {
        double acc = 0.0;
        for (int m = 0; m < M; ++m) {
          if (!active[static_cast<std::size_t>(m) * cfg.total_rbs + k]) continue;
          const double dx = ues[n].pos_x_m - npos[m].first;
          const double dy = ues[n].pos_y_m - npos[m].second;
          const double d = std::max(kMinDistanceM, std::hypot(dx, dy));
          acc += cfg.tx_power_mw * std::pow(d, -cfg.path_loss_exponent) * rng.exponential(1.0);
        }
        ch.interference_mw[static_cast<std::size_t>(n) * cfg.total_rbs + k] = acc;
      }
    }
  }
  return ch;
}

struct SliceRate {
  double total_bps = 0.0;
  std::vector<double> per_ue_bps;  // indexed like the UE sequence
};

// One-slot slice rate:
//   B * sum_n sum_k e[n][k] * b[l][k] * log2(1 + p d^-eta |h|^2 / (I + sigma^2))
// The step-level value is this averaged over the slot window by the caller.
inline SliceRate slice_rate(const RadioConfig& cfg, const ChannelState& ch, const Allocation& alloc,
                            const std::vector<UEState>& ues, int slice) {
  if (!cfg.finalized()) throw std::logic_error("slice_rate: RadioConfig not finalized");
  std::vector<int> ue_slice(ues.size());
  for (std::size_t n = 0; n < ues.size(); ++n) ue_slice[n] = ues[n].slice_id;
  validate_allocation(alloc, ue_slice);

  SliceRate out;
  out.per_ue_bps.assign(ues.size(), 0.0);
  for (int n = 0; n < static_cast<int>(ues.size()); ++n) {
    const double d = std::max(kMinDistanceM, ues[n].distance_m);
    const double rx = cfg.tx_power_mw * std::pow(d, -cfg.path_loss_exponent);
    double ue_bps = 0.0;
    for (int k = 0; k < alloc.n_rbs; ++k) {
      if (!(alloc.e(n, k) && alloc.b(slice, k))) continue;
      const double sinr = rx * ch.gain(n, k) / (ch.interference(n, k) + cfg.noise_mw);
      ue_bps += cfg.rb_bandwidth_hz * std::log2(1.0 + sinr);
    }
    out.per_ue_bps[n] = ue_bps;
    out.total_bps += ue_bps;
  }
  return out;
}

}  // namespace slicelab
