#include <catch2/catch.hpp>

#include <numeric>

#include "slicelab/mdp/encode.hpp"
#include "slicelab/mdp/env.hpp"
#include "slicelab/mdp/scheduler.hpp"
#include "slicelab/rng.hpp"

using namespace slicelab;

namespace {

std::vector<SliceSpec> three_slices() {
  SliceSpec embb{0, QosKind::throughput, 2e6, 5e5, 10e3, 1e5};
  SliceSpec mtc{1, QosKind::connection_density, 4.0, 1.0, 10e3, 1e5};
  SliceSpec urllc{2, QosKind::max_delay, 0.01, 0.005, 10e3, 1e5};
  return {embb, mtc, urllc};
}

std::vector<UEState> population(const std::vector<int>& per_slice, bool active = true) {
  std::vector<UEState> ues;
  int id = 0;
  for (std::size_t l = 0; l < per_slice.size(); ++l)
    for (int i = 0; i < per_slice[l]; ++i) {
      UEState u;
      u.ue_id = id++;
      u.slice_id = static_cast<int>(l);
      u.distance_m = 50.0;
      u.active = active;
      ues.push_back(u);
    }
  return ues;
}

}  // namespace

TEST_CASE("encode: all-zero QoS keeps only densities", "[mdp]") {
  QoSReport qos;
  qos.per_slice_value.assign(3, 0.0);
  qos.per_slice_satisfied_fraction.assign(3, 0.0);
  const Observation obs =
      encode_state(qos, three_slices(), {20, 20, 10}, 50, ActionVec::zeros(3));
  REQUIRE(obs.qos_values == std::vector<double>{0.0, 0.0, 0.0});
  REQUIRE(obs.prev_action == std::vector<double>{0.0, 0.0, 0.0});
  REQUIRE(obs.ue_density == std::vector<double>{0.4, 0.4, 0.2});
}

TEST_CASE("encode: Q at lambda normalizes to ones", "[mdp]") {
  const auto slices = three_slices();
  QoSReport qos;
  for (const auto& s : slices) qos.per_slice_value.push_back(s.lambda_target);
  qos.per_slice_satisfied_fraction.assign(3, 1.0);
  const Observation obs = encode_state(qos, slices, {10, 10, 10}, 30, ActionVec::zeros(3));
  for (double q : obs.qos_values) REQUIRE(q == Approx(1.0));
}

TEST_CASE("encode: missing slice entry is a shape error", "[mdp]") {
  QoSReport qos;
  qos.per_slice_value.assign(2, 1.0);  // one short
  REQUIRE_THROWS_AS(encode_state(qos, three_slices(), {10, 10, 10}, 30, ActionVec::zeros(3)),
                    std::invalid_argument);
}

TEST_CASE("encode: pure function, identical output on identical input", "[mdp]") {
  QoSReport qos;
  qos.per_slice_value = {1e6, 3.0, 0.02};
  qos.per_slice_satisfied_fraction = {0.5, 0.5, 0.5};
  const ActionVec prev{{0.2, 0.3, 0.4}};
  const Observation a = encode_state(qos, three_slices(), {5, 5, 5}, 15, prev);
  const Observation b = encode_state(qos, three_slices(), {5, 5, 5}, 15, prev);
  REQUIRE(a.flat() == b.flat());
}

TEST_CASE("scheduler: exact fractions give exact counts", "[mdp]") {
  const auto ues = population({3, 3, 4});
  const Allocation a = action_to_allocation(ActionVec{{0.5, 0.3, 0.2}}, 50, ues);
  std::vector<int> counts(3, 0);
  for (int l = 0; l < 3; ++l)
    for (int k = 0; k < 50; ++k) counts[l] += a.b(l, k);
  REQUIRE(counts == std::vector<int>{25, 15, 10});
}

TEST_CASE("scheduler: saturated action projects to a feasible split", "[mdp]") {
  const auto ues = population({3, 3, 4});
  const Allocation a = action_to_allocation(ActionVec{{1.0, 1.0, 1.0}}, 50, ues);
  std::vector<int> ue_slice;
  for (const auto& u : ues) ue_slice.push_back(u.slice_id);
  REQUIRE_NOTHROW(validate_allocation(a, ue_slice));
  int total = 0;
  for (int l = 0; l < 3; ++l)
    for (int k = 0; k < 50; ++k) total += a.b(l, k);
  REQUIRE(total <= 50);
  REQUIRE(total >= 49);  // thirds of 50 leave at most one RB unassigned
}

TEST_CASE("scheduler: zero action and zero K are valid degenerates", "[mdp]") {
  const auto ues = population({2, 2, 2});
  const Allocation zero_action = action_to_allocation(ActionVec{{0, 0, 0}}, 20, ues);
  for (auto b : zero_action.slice_rb) REQUIRE(b == 0);
  const Allocation zero_k = action_to_allocation(ActionVec{{0.5, 0.5, 0.0}}, 0, ues);
  REQUIRE(zero_k.n_rbs == 0);
}

TEST_CASE("scheduler: largest remainder stays within one of each quota", "[mdp]") {
  RngStream rng(6);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_index(5));
    const int total_units = 1 + static_cast<int>(rng.uniform_index(200));
    std::vector<double> fractions(n);
    double sum = 0.0;
    for (auto& f : fractions) {
      f = rng.uniform01();
      sum += f;
    }
    for (auto& f : fractions) f /= sum;  // proper quotas summing to total
    std::vector<double> quotas(n);
    for (int i = 0; i < n; ++i) quotas[i] = fractions[i] * total_units;
    const auto counts = apportion_largest_remainder(quotas, total_units);
    REQUIRE(std::accumulate(counts.begin(), counts.end(), 0) == total_units);
    for (int i = 0; i < n; ++i) REQUIRE(std::abs(counts[i] - quotas[i]) < 1.0);
  }
}

TEST_CASE("scheduler: 1e5 random actions always yield valid allocations", "[mdp][slow]") {
  RngStream rng(99);
  for (int trial = 0; trial < 100'000; ++trial) {
    const int L = 3;
    const int K = static_cast<int>(rng.uniform_index(60));
    std::vector<double> f(L);
    for (auto& x : f) x = rng.uniform01();
    auto ues = population({2, 3, 2});
    for (auto& u : ues) u.active = rng.bernoulli(0.7);
    const Allocation a = action_to_allocation(ActionVec{f}, K, ues);
    std::vector<int> ue_slice;
    for (const auto& u : ues) ue_slice.push_back(u.slice_id);
    REQUIRE_NOTHROW(validate_allocation(a, ue_slice));
  }
}

TEST_CASE("scheduler: round robin spreads a slice's RBs over its active UEs", "[mdp]") {
  auto ues = population({4});
  ues[3].active = false;
  const Allocation a = action_to_allocation(ActionVec{{1.0}}, 6, ues);
  std::vector<int> per_ue(4, 0);
  for (int n = 0; n < 4; ++n)
    for (int k = 0; k < 6; ++k) per_ue[n] += a.e(n, k);
  REQUIRE(per_ue == std::vector<int>{2, 2, 2, 0});
}

TEST_CASE("reward: bounds and summation", "[mdp]") {
  QoSReport qos;
  qos.per_slice_satisfied_fraction = {1.0, 1.0, 1.0};
  REQUIRE(compute_reward(qos) == Approx(3.0));
  qos.per_slice_satisfied_fraction = {0.0, 0.0, 0.0};
  REQUIRE(compute_reward(qos) == 0.0);
  qos.per_slice_satisfied_fraction = {1.0, 0.5, 0.25};
  REQUIRE(compute_reward(qos) == Approx(1.75));
}

TEST_CASE("mdp env: observation dimensions and reward bounds over a rollout", "[mdp]") {
  EnvConfig ec;
  ec.radio.total_rbs = 8;
  ec.radio.slots_per_step = 4;
  ec.slices = three_slices();
  ec.populations = {3, 4, 2};
  ec.traffic.session_on_rate_per_s = {0.2, 0.3, 0.0};
  ec.traffic.session_off_rate_per_s = {0.1, 0.1, 0.0};
  MdpEnv env(ec, 17);
  Observation obs = env.reset();
  REQUIRE(obs.dim() == 9);
  RngStream rng(3);
  for (int t = 0; t < 20; ++t) {
    ActionVec a{{rng.uniform01(), rng.uniform01(), rng.uniform01()}};
    const StepOut out = env.step(a);
    REQUIRE(out.reward >= 0.0);
    REQUIRE(out.reward <= 3.0);
    REQUIRE(out.next.finite());
    REQUIRE(out.next.prev_action == a.fractions);
    obs = out.next;
  }
}
