// MAC-layer mapping from a slice-fraction action to a feasible Allocation:
// feasibility projection, largest-remainder apportionment into integer RB
// counts, contiguous slice blocks, and round-robin over active UEs.
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "slicelab/mdp/types.hpp"
#include "slicelab/radio/types.hpp"

namespace slicelab {

// Largest-remainder apportionment of `total` units given nonnegative quotas.
// Each count differs from its quota by less than one; ties in the remainder
// go to the lower index.
inline std::vector<int> apportion_largest_remainder(const std::vector<double>& quotas, int total) {
  const int n = static_cast<int>(quotas.size());
  std::vector<int> counts(n, 0);
  int assigned = 0;
  std::vector<std::pair<double, int>> remainders;  // (-remainder, index) for stable ordering
  remainders.reserve(n);
  for (int i = 0; i < n; ++i) {
    counts[i] = static_cast<int>(std::floor(quotas[i]));
    assigned += counts[i];
    remainders.emplace_back(-(quotas[i] - counts[i]), i);
  }
  std::sort(remainders.begin(), remainders.end());
  for (int i = 0; i < total - assigned && i < n; ++i) ++counts[remainders[i].second];
  return counts;
}

// Derives the slice and UE RB indicators from the fraction action.
//  1. If the fractions sum past 1, scale them down by the sum.
//  2. Integer RB counts per slice by largest remainder of fraction * K.
//  3. Slices own contiguous RB blocks in slice order.
//  4. Within a slice, RBs round-robin over the currently active UEs.
// The result always satisfies the Allocation constraints. K = 0 yields a
// valid empty allocation.
inline Allocation action_to_allocation(const ActionVec& action, int n_rbs,
                                       const std::vector<UEState>& ues) {
  action.validate();
  const int L = action.size();
  Allocation alloc = Allocation::zeros(L, static_cast<int>(ues.size()), n_rbs);
  if (n_rbs == 0 || L == 0) return alloc;

  std::vector<double> frac = action.fractions;
  const double sum = std::accumulate(frac.begin(), frac.end(), 0.0);
  if (sum > 1.0)
    for (double& f : frac) f /= sum;

  std::vector<double> quotas(L);
  double quota_sum = 0.0;
  for (int l = 0; l < L; ++l) {
    quotas[l] = frac[l] * n_rbs;
    quota_sum += quotas[l];
  }
  const int total = std::min(n_rbs, static_cast<int>(std::lround(quota_sum)));
  const std::vector<int> counts = apportion_largest_remainder(quotas, total);

  // active UEs per slice, in UE order (slice ids are positions 0..L-1 here)
  std::vector<std::vector<int>> active(L);
  for (std::size_t n = 0; n < ues.size(); ++n)
    if (ues[n].active && ues[n].slice_id >= 0 && ues[n].slice_id < L)
      active[ues[n].slice_id].push_back(static_cast<int>(n));

  int next_rb = 0;
  for (int l = 0; l < L; ++l) {
    for (int j = 0; j < counts[l]; ++j) {
      const int k = next_rb++;
      alloc.b(l, k) = 1;
      if (!active[l].empty()) alloc.e(active[l][j % active[l].size()], k) = 1;
    }
  }
  return alloc;
}

}  // namespace slicelab
