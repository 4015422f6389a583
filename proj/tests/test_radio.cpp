#include <catch2/catch.hpp>

#include <algorithm>
#include <numeric>

#include "oracles.hpp"
#include "slicelab/radio/channel.hpp"
#include "slicelab/radio/environment.hpp"
#include "slicelab/radio/qos.hpp"

using namespace slicelab;

namespace {

RadioConfig small_radio(int n_rbs = 4, int slots = 2) {
  RadioConfig rc;
  rc.total_rbs = n_rbs;
  rc.slots_per_step = slots;
  rc.neighbor_count = 2;
  rc.finalize();
  return rc;
}

std::vector<UEState> make_ues(int n, int slice = 0, double distance = 100.0) {
  std::vector<UEState> ues(n);
  for (int i = 0; i < n; ++i) {
    ues[i].ue_id = i;
    ues[i].slice_id = slice;
    ues[i].pos_x_m = distance;
    ues[i].pos_y_m = 0.0;
    ues[i].distance_m = distance;
    ues[i].active = true;
  }
  return ues;
}

EnvConfig small_env_config() {
  EnvConfig ec;
  ec.radio = small_radio(6, 4);
  SliceSpec embb{0, QosKind::throughput, 2e6, 5e5, 10e3, 1e5};
  SliceSpec mtc{1, QosKind::connection_density, 2.0, 1.0, 10e3, 1e5};
  SliceSpec urllc{2, QosKind::max_delay, 0.01, 0.005, 10e3, 1e5};
  ec.slices = {embb, mtc, urllc};
  ec.populations = {3, 3, 2};
  ec.traffic.session_on_rate_per_s = {0.2, 0.2, 0.0};
  ec.traffic.session_off_rate_per_s = {0.05, 0.05, 0.0};
  ec.traffic.packet_rate_per_s = 2.0;
  return ec;
}

}  // namespace

TEST_CASE("channel: no neighbors means zero interference", "[radio]") {
  RadioConfig rc = small_radio();
  rc.neighbor_count = 0;
  rc.finalize();
  RngStream rng(7);
  const auto ues = make_ues(3);
  const ChannelState ch = sample_channel(rc, ues, rng);
  for (double i : ch.interference_mw) REQUIRE(i == 0.0);
}

TEST_CASE("channel: empty UE sequence yields empty state", "[radio]") {
  RadioConfig rc = small_radio();
  RngStream rng(7);
  const ChannelState ch = sample_channel(rc, {}, rng);
  REQUIRE(ch.n_ues == 0);
  REQUIRE(ch.gains.empty());
}

TEST_CASE("channel: non-finite distance rejected", "[radio]") {
  RadioConfig rc = small_radio();
  RngStream rng(7);
  auto ues = make_ues(1);
  ues[0].distance_m = std::numeric_limits<double>::quiet_NaN();
  REQUIRE_THROWS_AS(sample_channel(rc, ues, rng), std::invalid_argument);
}

TEST_CASE("channel: Rayleigh gain sample mean and variance near 1", "[radio][slow]") {
  RadioConfig rc;
  rc.total_rbs = 1000;
  rc.neighbor_count = 0;
  rc.finalize();
  const auto ues = make_ues(1000);
  RngStream rng(12345);
  const ChannelState ch = sample_channel(rc, ues, rng);
  REQUIRE(ch.gains.size() == 1'000'000);
  const double mean =
      std::accumulate(ch.gains.begin(), ch.gains.end(), 0.0) / static_cast<double>(ch.gains.size());
  double var = 0.0;
  for (double g : ch.gains) var += (g - mean) * (g - mean);
  var /= static_cast<double>(ch.gains.size());
  REQUIRE(mean == Approx(1.0).margin(0.01));
  REQUIRE(var == Approx(1.0).margin(0.01));
}

TEST_CASE("channel: same seed twice is bit identical", "[radio]") {
  RadioConfig rc = small_radio();
  const auto ues = make_ues(4);
  RngStream r1(99), r2(99);
  const ChannelState a = sample_channel(rc, ues, r1);
  const ChannelState b = sample_channel(rc, ues, r2);
  REQUIRE(a.gains == b.gains);
  REQUIRE(a.interference_mw == b.interference_mw);
}

TEST_CASE("rate: all-zero UE allocation gives zero rate", "[radio]") {
  RadioConfig rc = small_radio();
  const auto ues = make_ues(3);
  RngStream rng(1);
  const ChannelState ch = sample_channel(rc, ues, rng);
  Allocation alloc = Allocation::zeros(1, 3, rc.total_rbs);
  for (int k = 0; k < rc.total_rbs; ++k) alloc.b(0, k) = 1;  // slice owns RBs, no UE does
  const SliceRate r = slice_rate(rc, ch, alloc, ues, 0);
  REQUIRE(r.total_bps == 0.0);
}

TEST_CASE("rate: unit SINR on one RB equals B", "[radio]") {
  RadioConfig rc = small_radio(1, 1);
  auto ues = make_ues(1);
  Allocation alloc = Allocation::zeros(1, 1, 1);
  alloc.b(0, 0) = 1;
  alloc.e(0, 0) = 1;
  ChannelState ch;
  ch.n_ues = 1;
  ch.n_rbs = 1;
  // gain chosen so p * d^-eta * g == noise: SINR exactly 1
  const double rx = rc.tx_power_mw * std::pow(ues[0].distance_m, -rc.path_loss_exponent);
  ch.gains = {rc.noise_mw / rx};
  ch.interference_mw = {0.0};
  const SliceRate r = slice_rate(rc, ch, alloc, ues, 0);
  REQUIRE(r.total_bps == Approx(rc.rb_bandwidth_hz).epsilon(1e-12));
}

TEST_CASE("rate: matches the brute-force triple sum on random instances", "[radio]") {
  RngStream rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const int n_ues = 2 + static_cast<int>(rng.uniform_index(4));
    const int n_rbs = 1 + static_cast<int>(rng.uniform_index(8));
    RadioConfig rc = small_radio(n_rbs, 1);
    auto ues = make_ues(n_ues);
    for (auto& u : ues) u.distance_m = rng.uniform(5.0, 240.0);
    const ChannelState ch = sample_channel(rc, ues, rng);
    // all UEs in slice 0; slice 1 owns some RBs which then carry no UEs
    Allocation alloc = Allocation::zeros(2, n_ues, n_rbs);
    for (int k = 0; k < n_rbs; ++k) {
      const int owner = static_cast<int>(rng.uniform_index(2));
      alloc.b(owner, k) = 1;
      if (owner == 0 && rng.bernoulli(0.8))
        alloc.e(static_cast<int>(rng.uniform_index(n_ues)), k) = 1;
    }
    const SliceRate r = slice_rate(rc, ch, alloc, ues, 0);
    const double expect = oracles::rate_triple_sum(rc.rb_bandwidth_hz, rc.tx_power_mw, rc.noise_mw,
                                                   rc.path_loss_exponent, ch, alloc, ues, 0);
    REQUIRE(r.total_bps == Approx(expect).epsilon(1e-12).margin(1e-12));
  }
}

TEST_CASE("rate: invalid allocations are rejected with the constraint name", "[radio]") {
  RadioConfig rc = small_radio(2, 1);
  const auto ues = make_ues(2);
  RngStream rng(5);
  const ChannelState ch = sample_channel(rc, ues, rng);

  SECTION("two slices on one RB") {
    Allocation a = Allocation::zeros(2, 2, 2);
    a.b(0, 0) = 1;
    a.b(1, 0) = 1;
    REQUIRE_THROWS_WITH(slice_rate(rc, ch, a, ues, 0), Catch::Contains("rb-single-slice"));
  }
  SECTION("UE outside its slice's RBs") {
    Allocation a = Allocation::zeros(2, 2, 2);
    a.b(1, 0) = 1;
    a.e(0, 0) = 1;  // UE 0 is slice 0
    REQUIRE_THROWS_WITH(slice_rate(rc, ch, a, ues, 0), Catch::Contains("ue-in-own-slice"));
  }
  SECTION("budget blown by shared RBs") {
    Allocation a = Allocation::zeros(1, 2, 1);
    a.b(0, 0) = 1;
    a.e(0, 0) = 1;
    a.e(1, 0) = 1;  // two UEs on the single RB: sum b*e = 2 > K = 1
    REQUIRE_THROWS_WITH(slice_rate(rc, ch, a, ues, 0), Catch::Contains("total-rb-budget"));
  }
}

TEST_CASE("qos: all-zero eMBB rates give zero value and zero satisfaction", "[radio]") {
  RadioConfig rc = small_radio(4, 3);
  SliceSpec embb{0, QosKind::throughput, 2e6, 5e5, 10e3, 1e5};
  SlotWindow w;
  w.ue_slice = {0, 0};
  w.rates_bps.assign(3, std::vector<double>(2, 0.0));
  const QoSReport rep = qos_metrics(rc, {embb}, w);
  REQUIRE(rep.per_slice_value[0] == 0.0);
  REQUIRE(rep.per_slice_satisfied_fraction[0] == 0.0);
}

TEST_CASE("qos: constant rate at lambda satisfies every slot", "[radio]") {
  RadioConfig rc = small_radio(4, 5);
  SliceSpec embb{0, QosKind::throughput, 2e6, 5e5, 10e3, 1e5};
  SlotWindow w;
  w.ue_slice = {0, 0, 0};
  w.rates_bps.assign(5, std::vector<double>(3, 2e6));
  const QoSReport rep = qos_metrics(rc, {embb}, w);
  REQUIRE(rep.per_slice_satisfied_fraction[0] == 1.0);
  REQUIRE(rep.per_slice_value[0] == Approx(2e6));
}

TEST_CASE("qos: MTC count matches the sort-and-count oracle on the fixture", "[radio]") {
  RadioConfig rc = small_radio(4, 2);
  // threshold sits between the 2nd and 3rd sorted mean rates
  const std::vector<double> means{1e5, 3e5, 5e5, 7e5, 9e5};
  SliceSpec mtc{0, QosKind::connection_density, 4.0, 1.0, 10e3, 4e5};
  SlotWindow w;
  w.ue_slice.assign(5, 0);
  w.rates_bps.assign(2, means);
  const QoSReport rep = qos_metrics(rc, {mtc}, w);
  const int expect = oracles::count_at_or_above(means, mtc.mtc_min_rate_bps);
  REQUIRE(expect == 3);
  REQUIRE(rep.per_slice_value[0] == Approx(3.0));
}

TEST_CASE("qos: zero-rate UE with backlog contributes the capped delay", "[radio]") {
  RadioConfig rc = small_radio(4, 2);
  SliceSpec urllc{0, QosKind::max_delay, 0.01, 0.005, 10e3, 1e5};
  SlotWindow w;
  w.ue_slice = {0};
  w.rates_bps.assign(2, std::vector<double>(1, 0.0));
  w.arrivals.push_back({0, 0, 8e3, 1e4});
  const QoSReport rep = qos_metrics(rc, {urllc}, w);
  REQUIRE(rep.per_slice_value[0] == Approx(rc.slots_per_step * rc.slot_duration_s));
}

TEST_CASE("qos: satisfied fraction invariant under relabeling within a slice", "[radio]") {
  RadioConfig rc = small_radio(4, 6);
  SliceSpec embb{0, QosKind::throughput, 5e5, 2e5, 10e3, 1e5};
  SliceSpec mtc{1, QosKind::connection_density, 2.0, 1.0, 10e3, 3e5};
  RngStream rng(31);
  SlotWindow w;
  w.ue_slice = {0, 0, 0, 1, 1};
  w.rates_bps.assign(6, std::vector<double>(5, 0.0));
  for (auto& slot : w.rates_bps)
    for (auto& r : slot) r = rng.uniform(0.0, 1e6);

  SlotWindow permuted = w;
  for (auto& slot : permuted.rates_bps) {
    std::swap(slot[0], slot[2]);  // within slice 0
    std::swap(slot[3], slot[4]);  // within slice 1
  }
  const QoSReport a = qos_metrics(rc, {embb, mtc}, w);
  const QoSReport b = qos_metrics(rc, {embb, mtc}, permuted);
  REQUIRE(a.per_slice_satisfied_fraction == b.per_slice_satisfied_fraction);
}

TEST_CASE("env: zero speed leaves positions unchanged", "[radio]") {
  EnvConfig ec = small_env_config();
  ec.radio.ue_speed_mps = 0.0;
  RadioEnv env(ec, 5);
  const auto before = env.ues();
  env.step(Allocation::zeros(3, static_cast<int>(before.size()), ec.radio.total_rbs));
  const auto& after = env.ues();
  for (std::size_t i = 0; i < before.size(); ++i) {
    REQUIRE(after[i].pos_x_m == before[i].pos_x_m);
    REQUIRE(after[i].pos_y_m == before[i].pos_y_m);
  }
}

TEST_CASE("env: positions stay inside the cell over many steps", "[radio][slow]") {
  EnvConfig ec = small_env_config();
  ec.radio.ue_speed_mps = 25.0;
  ec.radio.slots_per_step = 1;
  RadioEnv env(ec, 11);
  const Allocation none = Allocation::zeros(3, ec.total_ues(), ec.radio.total_rbs);
  for (int step = 0; step < 10'000; ++step) {
    env.step(none);
    for (const auto& ue : env.ues())
      REQUIRE(std::hypot(ue.pos_x_m, ue.pos_y_m) <= ec.radio.cell_radius_m + 1e-9);
  }
}

TEST_CASE("env: more RBs never hurt a slice on the same seed", "[radio]") {
  EnvConfig ec = small_env_config();
  const int n_ues = ec.total_ues();

  Allocation all = Allocation::zeros(3, n_ues, ec.radio.total_rbs);
  for (int k = 0; k < ec.radio.total_rbs; ++k) {
    all.b(0, k) = 1;
    all.e(k % 3, k) = 1;  // slice 0 members are UEs 0..2
  }
  Allocation one = Allocation::zeros(3, n_ues, ec.radio.total_rbs);
  one.b(0, 0) = 1;
  one.e(0, 0) = 1;

  RadioEnv env_all(ec, 42);
  RadioEnv env_one(ec, 42);
  double mean_all = 0.0, mean_one = 0.0;
  for (int s = 0; s < 5; ++s) {
    const QoSReport ra = env_all.step(all);
    const QoSReport ro = env_one.step(one);
    mean_all += ra.per_slice_value[0];
    mean_one += ro.per_slice_value[0];
  }
  REQUIRE(mean_all > mean_one);
}

TEST_CASE("env: identical seeds give identical trajectories", "[radio]") {
  EnvConfig ec = small_env_config();
  RadioEnv a(ec, 77), b(ec, 77);
  Allocation alloc = Allocation::zeros(3, ec.total_ues(), ec.radio.total_rbs);
  alloc.b(0, 0) = 1;
  alloc.e(0, 0) = 1;
  for (int s = 0; s < 3; ++s) {
    const QoSReport ra = a.step(alloc);
    const QoSReport rb = b.step(alloc);
    REQUIRE(ra.per_user_throughput_bps == rb.per_user_throughput_bps);
    REQUIRE(ra.per_slice_value == rb.per_slice_value);
    REQUIRE(ra.per_slice_satisfied_fraction == rb.per_slice_satisfied_fraction);
  }
  for (std::size_t i = 0; i < a.ues().size(); ++i) {
    REQUIRE(a.ues()[i].pos_x_m == b.ues()[i].pos_x_m);
    REQUIRE(a.ues()[i].queue_bits == b.ues()[i].queue_bits);
  }
}

TEST_CASE("allocation: random invalid matrices are always rejected", "[radio]") {
  RngStream rng(808);
  int rejected = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const int L = 2 + static_cast<int>(rng.uniform_index(2));
    const int n_ues = 2 + static_cast<int>(rng.uniform_index(4));
    const int n_rbs = 1 + static_cast<int>(rng.uniform_index(5));
    std::vector<int> ue_slice(n_ues);
    for (auto& s : ue_slice) s = static_cast<int>(rng.uniform_index(L));
    Allocation a = Allocation::zeros(L, n_ues, n_rbs);
    for (auto& v : a.slice_rb) v = rng.bernoulli(0.6);
    for (auto& v : a.ue_rb) v = rng.bernoulli(0.6);

    bool violates = false;
    for (int k = 0; k < n_rbs && !violates; ++k) {
      int owners = 0;
      for (int l = 0; l < L; ++l) owners += a.b(l, k);
      if (owners > 1) violates = true;
    }
    long granted = 0;
    for (int k = 0; k < n_rbs; ++k) {
      int owners = 0, users = 0;
      for (int l = 0; l < L; ++l) owners += a.b(l, k);
      for (int n = 0; n < n_ues; ++n) users += a.e(n, k);
      granted += static_cast<long>(owners) * users;
    }
    if (granted > n_rbs) violates = true;
    for (int n = 0; n < n_ues && !violates; ++n)
      for (int k = 0; k < n_rbs && !violates; ++k)
        if (a.e(n, k) && !a.b(ue_slice[n], k)) violates = true;

    if (!violates) continue;
    ++rejected;
    REQUIRE_THROWS_AS(validate_allocation(a, ue_slice), std::invalid_argument);
  }
  REQUIRE(rejected > 100);  // the generator actually produced invalid cases
}
