// Test-only reference implementations, independent of the library code
// paths they check.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "slicelab/nn/tensor.hpp"
#include "slicelab/radio/types.hpp"
#include "slicelab/rng.hpp"

namespace oracles {

// Literal triple-sum of the slice rate equation, scalar loop over every
// (UE, RB) pair, no shortcuts shared with the library implementation.
inline double rate_triple_sum(double rb_bandwidth_hz, double tx_power_mw, double noise_mw,
                              double path_loss_exponent, const slicelab::ChannelState& ch,
                              const slicelab::Allocation& alloc,
                              const std::vector<slicelab::UEState>& ues, int slice) {
  double total = 0.0;
  for (std::size_t n = 0; n < ues.size(); ++n) {
    for (int k = 0; k < alloc.n_rbs; ++k) {
      const double e = alloc.e(static_cast<int>(n), k);
      const double b = alloc.b(slice, k);
      const double d = std::max(1.0, ues[n].distance_m);
      const double num = tx_power_mw * std::pow(d, -path_loss_exponent) * ch.gain(static_cast<int>(n), k);
      const double den = ch.interference(static_cast<int>(n), k) + noise_mw;
      total += e * b * rb_bandwidth_hz * std::log2(1.0 + num / den);
    }
  }
  return total;
}

// Count of members whose mean rate clears the threshold, by sort-and-scan.
inline int count_at_or_above(std::vector<double> means, double threshold) {
  std::sort(means.begin(), means.end());
  int count = 0;
  for (double m : means)
    if (m >= threshold) ++count;
  return count;
}

// Two-pass population variance.
inline double population_std(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return std::sqrt(var / static_cast<double>(xs.size()));
}

// Central finite differences against analytic gradients captured by the
// caller. `loss` must recompute the scalar from current parameter values.
struct FdReport {
  double max_rel_err = 0.0;
  int checked = 0;
};

inline double rel_err(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-8});
  return std::abs(a - b) / scale;
}

inline FdReport fd_check_params(const std::function<double()>& loss,
                                const std::vector<slicelab::ParamTensor*>& params,
                                const std::vector<std::vector<double>>& analytic, double h,
                                int coords_per_tensor, slicelab::RngStream& pick) {
  FdReport rep;
  for (std::size_t t = 0; t < params.size(); ++t) {
    slicelab::ParamTensor& p = *params[t];
    const int n_check = std::min<int>(coords_per_tensor, static_cast<int>(p.size()));
    for (int c = 0; c < n_check; ++c) {
      const std::size_t j =
          p.size() <= static_cast<std::size_t>(coords_per_tensor) ? c : pick.uniform_index(p.size());
      const double saved = p.v[j];
      p.v[j] = saved + h;
      const double fp = loss();
      p.v[j] = saved - h;
      const double fm = loss();
      p.v[j] = saved;
      const double fd = (fp - fm) / (2.0 * h);
      const double a = analytic[t][j];
      ++rep.checked;
      // central differences carry ~eps/h absolute noise; below that the
      // comparison is meaningless
      if (std::abs(fd - a) < 1e-9) continue;
      rep.max_rel_err = std::max(rep.max_rel_err, rel_err(fd, a));
    }
  }
  return rep;
}

inline FdReport fd_check_vector(const std::function<double()>& loss, std::vector<double>& x,
                                const std::vector<double>& analytic, double h) {
  FdReport rep;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double saved = x[j];
    x[j] = saved + h;
    const double fp = loss();
    x[j] = saved - h;
    const double fm = loss();
    x[j] = saved;
    const double fd = (fp - fm) / (2.0 * h);
    ++rep.checked;
    if (std::abs(fd - analytic[j]) < 1e-9) continue;
    rep.max_rel_err = std::max(rep.max_rel_err, rel_err(fd, analytic[j]));
  }
  return rep;
}

}  // namespace oracles
