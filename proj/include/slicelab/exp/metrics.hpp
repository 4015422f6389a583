// Result records and the plot-ready reductions: empirical CDFs, violation
// spread, and byte-stable CSV output.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "slicelab/train/trainer.hpp"

namespace slicelab {

// One training iteration as written to returns.csv.
struct MetricsRecord {
  int iteration = 0;
  CriticMode mode = CriticMode::attention;
  std::vector<double> per_agent_return;
  double mean_return = 0.0;
  std::vector<double> per_slice_violation;
  std::vector<std::pair<int, double>> per_user_throughput_sample;
};

inline MetricsRecord to_metrics_record(const IterationMetrics& m, CriticMode mode) {
  MetricsRecord r;
  r.iteration = m.iteration;
  r.mode = mode;
  r.per_agent_return = m.per_agent_return;
  r.mean_return = m.mean_return;
  r.per_slice_violation = m.per_slice_violation;
  r.per_user_throughput_sample = m.throughput_samples;
  return r;
}

// Shortest representation that round-trips a double; identical inputs give
// identical bytes, which the determinism contract relies on.
inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct CdfPoint {
  double value = 0.0;
  double fraction = 0.0;
};

// Empirical CDF: values ascending, fractions climbing from 1/n to 1.
inline std::vector<CdfPoint> build_cdf(std::vector<double> samples) {
  if (samples.empty()) throw std::invalid_argument("build_cdf: no samples");
  std::sort(samples.begin(), samples.end());
  std::vector<CdfPoint> out;
  out.reserve(samples.size());
  const double n = static_cast<double>(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    out.push_back({samples[i], static_cast<double>(i + 1) / n});
  return out;
}

// Population standard deviation per slice over the iteration series.
inline std::vector<double> violation_std(const std::vector<std::vector<double>>& series) {
  if (series.size() < 2) throw std::invalid_argument("violation_std: need at least 2 iterations");
  const std::size_t L = series.front().size();
  std::vector<double> mean(L, 0.0), var(L, 0.0);
  for (const auto& row : series) {
    if (row.size() != L) throw std::invalid_argument("violation_std: ragged series");
    for (std::size_t l = 0; l < L; ++l) mean[l] += row[l];
  }
  for (auto& m : mean) m /= static_cast<double>(series.size());
  for (const auto& row : series)
    for (std::size_t l = 0; l < L; ++l) var[l] += (row[l] - mean[l]) * (row[l] - mean[l]);
  std::vector<double> out(L);
  for (std::size_t l = 0; l < L; ++l) out[l] = std::sqrt(var[l] / static_cast<double>(series.size()));
  return out;
}

inline void write_returns_csv(const std::string& path, const std::vector<MetricsRecord>& records) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  const int n_agents = records.empty() ? 0 : static_cast<int>(records.front().per_agent_return.size());
  f << "iteration,mode";
  for (int i = 0; i < n_agents; ++i) f << ",return_agent_" << i;
  f << ",mean_return\n";
  for (const auto& r : records) {
    f << r.iteration << ',' << critic_mode_name(r.mode);
    for (double v : r.per_agent_return) f << ',' << fmt_double(v);
    f << ',' << fmt_double(r.mean_return) << '\n';
  }
}

inline void write_cdf_csv(const std::string& path,
                          const std::vector<std::pair<std::string, std::vector<double>>>& phases) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << "phase,throughput_bps,cum_fraction\n";
  for (const auto& [phase, samples] : phases) {
    if (samples.empty()) continue;
    for (const auto& p : build_cdf(samples))
      f << phase << ',' << fmt_double(p.value) << ',' << fmt_double(p.fraction) << '\n';
  }
}

inline void write_violations_csv(const std::string& path, CriticMode mode,
                                 const std::vector<std::string>& slice_names,
                                 const std::vector<std::vector<double>>& series) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  const std::vector<double> stds = violation_std(series);
  std::vector<double> means(slice_names.size(), 0.0);
  for (const auto& row : series)
    for (std::size_t l = 0; l < row.size(); ++l) means[l] += row[l] / series.size();
  f << "mode,slice,mean_violation,std_violation,n_iterations\n";
  for (std::size_t l = 0; l < slice_names.size(); ++l)
    f << critic_mode_name(mode) << ',' << slice_names[l] << ',' << fmt_double(means[l]) << ','
      << fmt_double(stds[l]) << ',' << series.size() << '\n';
}

}  // namespace slicelab
