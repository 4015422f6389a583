// Physical-layer configuration and the data carried between the channel,
// scheduler and QoS layers of one DU cell.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace slicelab {

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

enum class QosKind { throughput, connection_density, max_delay };

inline const char* qos_kind_name(QosKind k) {
  switch (k) {
    case QosKind::throughput: return "throughput";
    case QosKind::connection_density: return "connection_density";
    case QosKind::max_delay: return "max_delay";
  }
  return "?";
}

struct RadioConfig {
  double rb_bandwidth_hz = 200e3;
  double subcarrier_spacing_hz = 15e3;
  int total_rbs = 50;
  double tx_power_per_rb_dbm = 56.0;
  double noise_variance_dbm = -173.0;
  double path_loss_exponent = 3.0;
  double cell_radius_m = 250.0;
  int neighbor_count = 2;
  double neighbor_activity_prob = 0.5;
  int slots_per_step = 20;  // finite averaging window per RL step
  double slot_duration_s = 1.0;
  double ue_speed_mps = 1.0;

  // Linear-unit caches; inner loops never touch dBm. Populated by finalize().
  double tx_power_mw = -1.0;
  double noise_mw = -1.0;

  void finalize() {
    validate();
    tx_power_mw = dbm_to_mw(tx_power_per_rb_dbm);
    noise_mw = dbm_to_mw(noise_variance_dbm);
  }

  bool finalized() const { return tx_power_mw > 0.0 && noise_mw > 0.0; }

  void validate() const {
    if (total_rbs <= 0) throw std::invalid_argument("RadioConfig: total_rbs must be > 0");
    if (rb_bandwidth_hz <= 0) throw std::invalid_argument("RadioConfig: rb_bandwidth_hz must be > 0");
    if (neighbor_activity_prob < 0 || neighbor_activity_prob > 1)
      throw std::invalid_argument("RadioConfig: neighbor_activity_prob must be in [0,1]");
    if (path_loss_exponent < 2) throw std::invalid_argument("RadioConfig: path_loss_exponent must be >= 2");
    if (slots_per_step < 1) throw std::invalid_argument("RadioConfig: slots_per_step must be >= 1");
    if (neighbor_count < 0) throw std::invalid_argument("RadioConfig: neighbor_count must be >= 0");
    if (cell_radius_m <= 0) throw std::invalid_argument("RadioConfig: cell_radius_m must be > 0");
  }
};

// Per-slice QoS contract: target lambda with tolerance epsilon, in the
// slice's own units (bps, device count or seconds).
struct SliceSpec {
  int slice_id = 0;
  QosKind qos_kind = QosKind::throughput;
  double lambda_target = 0.0;
  double epsilon_margin = 0.0;
  double packet_mean_bits = 10e3;    // max_delay slices
  double mtc_min_rate_bps = 100e3;   // connection_density slices: rate counted as "connected"

  void validate() const {
    if (epsilon_margin <= 0) throw std::invalid_argument("SliceSpec: epsilon_margin must be > 0");
    if (lambda_target <= 0) throw std::invalid_argument("SliceSpec: lambda_target must be > 0");
    if (qos_kind == QosKind::max_delay && packet_mean_bits <= 0)
      throw std::invalid_argument("SliceSpec: packet_mean_bits must be > 0 for max_delay slices");
  }
};

struct UEState {
  int ue_id = 0;
  int slice_id = 0;
  double pos_x_m = 0.0;
  double pos_y_m = 0.0;
  double distance_m = 1.0;  // to the serving O-RU at the origin
  bool active = true;
  double queue_bits = 0.0;  // max_delay slices only
};

// Fading gains and interference per (UE, RB) for one slot. Row-major [ue][rb].
struct ChannelState {
  int n_ues = 0;
  int n_rbs = 0;
  std::vector<double> gains;            // |h|^2, dimensionless
  std::vector<double> interference_mw;  // aggregate neighbor-RU power

  double gain(int ue, int rb) const { return gains[static_cast<std::size_t>(ue) * n_rbs + rb]; }
  double interference(int ue, int rb) const {
    return interference_mw[static_cast<std::size_t>(ue) * n_rbs + rb];
  }
};

// Slice-level (b) and UE-level (e) RB indicators.
struct Allocation {
  int n_slices = 0;
  int n_ues = 0;
  int n_rbs = 0;
  std::vector<std::uint8_t> slice_rb;  // b[l][k], row-major
  std::vector<std::uint8_t> ue_rb;     // e[n][k], row-major

  static Allocation zeros(int n_slices, int n_ues, int n_rbs) {
    Allocation a;
    a.n_slices = n_slices;
    a.n_ues = n_ues;
    a.n_rbs = n_rbs;
    a.slice_rb.assign(static_cast<std::size_t>(n_slices) * n_rbs, 0);
    a.ue_rb.assign(static_cast<std::size_t>(n_ues) * n_rbs, 0);
    return a;
  }

  std::uint8_t& b(int l, int k) { return slice_rb[static_cast<std::size_t>(l) * n_rbs + k]; }
  std::uint8_t b(int l, int k) const { return slice_rb[static_cast<std::size_t>(l) * n_rbs + k]; }
  std::uint8_t& e(int n, int k) { return ue_rb[static_cast<std::size_t>(n) * n_rbs + k]; }
  std::uint8_t e(int n, int k) const { return ue_rb[static_cast<std::size_t>(n) * n_rbs + k]; }
};

// Validates the allocation against its structural constraints. Throws
// std::invalid_argument naming the violated constraint.
//   - per RB, at most one slice may own it
//   - total granted (UE, RB) pairs must not exceed the RB budget
//   - a UE may only use RBs owned by its own slice
inline void validate_allocation(const Allocation& a, const std::vector<int>& ue_slice) {
  if (static_cast<int>(ue_slice.size()) != a.n_ues)
    throw std::invalid_argument("allocation: ue_slice size mismatch");
  long granted = 0;  // sum_{l,n,k} b[l][k] * e[n][k]
  for (int k = 0; k < a.n_rbs; ++k) {
    int owners = 0;
    for (int l = 0; l < a.n_slices; ++l) owners += a.b(l, k);
    if (owners > 1)
      throw std::invalid_argument("allocation violates rb-single-slice: RB " + std::to_string(k) +
                                  " owned by " + std::to_string(owners) + " slices");
    int users = 0;
    for (int n = 0; n < a.n_ues; ++n) users += a.e(n, k);
    granted += static_cast<long>(owners) * users;
  }
  if (granted > a.n_rbs)
    throw std::invalid_argument("allocation violates total-rb-budget: " + std::to_string(granted) +
                                " grants over " + std::to_string(a.n_rbs) + " RBs");
  for (int n = 0; n < a.n_ues; ++n) {
    const int l = ue_slice[n];
    for (int k = 0; k < a.n_rbs; ++k) {
      if (a.e(n, k) && !a.b(l, k))
        throw std::invalid_argument("allocation violates ue-in-own-slice: UE " + std::to_string(n) +
                                    " uses RB " + std::to_string(k) + " not owned by slice " +
                                    std::to_string(l));
    }
  }
}

// Aggregated QoS over one step window.
struct QoSReport {
  std::vector<double> per_slice_value;               // achieved Q_l, slice units
  std::vector<double> per_slice_satisfied_fraction;  // empirical P(|Q_l - lambda| <= eps)
  std::vector<double> per_user_throughput_bps;       // window-mean rate per UE
};

}  // namespace slicelab
