// Reparameterized squashed-Gaussian policy head: action = (tanh(u)+1)/2
// with u = mean + exp(log_std) * xi, plus the exact change-of-variables
// log-density and the partial derivatives the policy update needs.
#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "slicelab/rng.hpp"

namespace slicelab {

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;

inline double softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }
inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Smooth clamp of the raw log-std head output into (kLogStdMin, kLogStdMax).
// Identity-like in the middle of the range, saturating at the ends, so the
// gradient never dies the way a hard clamp's would.
inline double soft_clamp_log_std(double raw) {
  const double t = kLogStdMax - softplus(kLogStdMax - raw);
  return kLogStdMin + softplus(t - kLogStdMin);
}

inline double soft_clamp_log_std_grad(double raw) {
  const double t = kLogStdMax - softplus(kLogStdMax - raw);
  return sigmoid(t - kLogStdMin) * sigmoid(kLogStdMax - raw);
}

// log((1 - tanh(u)^2) / 2) without cancellation.
inline double log_squash_jacobian(double u) {
  return std::log(2.0) - 2.0 * (u + softplus(-2.0 * u));
}

struct GaussianSample {
  std::vector<double> action;   // in (0,1)^L
  std::vector<double> u;        // pre-squash sample
  std::vector<double> xi;       // standard normal draw (zeros when rng == nullptr)
  std::vector<double> log_std;  // clamped values actually used
  double log_prob = 0.0;
};

// Evaluates the squashed sample pathway for a given noise vector.
inline GaussianSample sample_squashed_with_noise(std::span<const double> mean,
                                                 std::span<const double> log_std,
                                                 std::span<const double> xi) {
  if (mean.size() != log_std.size() || mean.size() != xi.size())
    throw std::invalid_argument("sample_squashed: mean/log_std/xi size mismatch");
  const std::size_t L = mean.size();
  GaussianSample s;
  s.action.resize(L);
  s.u.resize(L);
  s.xi.assign(xi.begin(), xi.end());
  s.log_std.assign(log_std.begin(), log_std.end());
  constexpr double kHalfLog2Pi = 0.9189385332046727;
  for (std::size_t i = 0; i < L; ++i) {
    const double sd = std::exp(log_std[i]);
    s.u[i] = mean[i] + sd * s.xi[i];
    s.action[i] = 0.5 * (std::tanh(s.u[i]) + 1.0);
    // log N(u; mean, sd) - log |da/du|
    s.log_prob += -log_std[i] - kHalfLog2Pi - 0.5 * s.xi[i] * s.xi[i] - log_squash_jacobian(s.u[i]);
  }
  return s;
}

// Draws the reparameterized sample. log_std entries arrive already clamped.
// rng == nullptr means the deterministic mode: xi = 0, u = mean.
inline GaussianSample sample_squashed(std::span<const double> mean, std::span<const double> log_std,
                                      RngStream* rng) {
  std::vector<double> xi(mean.size(), 0.0);
  if (rng)
    for (double& x : xi) x = rng->normal();
  return sample_squashed_with_noise(mean, log_std, xi);
}

// Partial derivatives of the sampled pathway, all with xi held fixed:
//   d action_i / d mean_i      = h'(u_i)                  h(u) = (tanh u + 1)/2
//   d action_i / d log_std_i   = h'(u_i) * sd_i * xi_i
//   d log_prob / d mean_i      = 2 tanh(u_i)
//   d log_prob / d log_std_i   = -1 + 2 tanh(u_i) * sd_i * xi_i
// Callers combine these with d(loss)/d(action) and d(loss)/d(log_prob) to get
// gradients at the mean / log_std heads (clamped coordinates).
struct GaussianGrads {
  std::vector<double> d_mean;
  std::vector<double> d_log_std;
};

inline GaussianGrads gaussian_backward(const GaussianSample& s, std::span<const double> d_action,
                                       double d_log_prob) {
  const std::size_t L = s.action.size();
  if (d_action.size() != L) throw std::invalid_argument("gaussian_backward: d_action size mismatch");
  GaussianGrads g;
  g.d_mean.assign(L, 0.0);
  g.d_log_std.assign(L, 0.0);
  for (std::size_t i = 0; i < L; ++i) {
    const double th = std::tanh(s.u[i]);
    const double h_prime = 0.5 * (1.0 - th * th);
    const double sd_xi = std::exp(s.log_std[i]) * s.xi[i];
    g.d_mean[i] = d_action[i] * h_prime + d_log_prob * 2.0 * th;
    g.d_log_std[i] = d_action[i] * h_prime * sd_xi + d_log_prob * (-1.0 + 2.0 * th * sd_xi);
  }
  return g;
}

}  // namespace slicelab
