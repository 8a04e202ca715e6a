// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "netsim/error.hpp"
#include "netsim/random.hpp"
#include "netsim/rl/optimizers.hpp"

using namespace netsim;
using namespace netsim::rl;

namespace {

std::shared_ptr<const Scenario> load(const char* name) {
  return std::make_shared<const Scenario>(parse_scenario(std::string(NETSIM_SCENARIO_DIR "/") + name));
}

std::shared_ptr<const Scenario> off_boresight() {
  static auto sc = load("off_boresight_cluster.toml");
  return sc;
}

std::shared_ptr<const Scenario> reference() {
  static auto sc = load("reference.toml");
  return sc;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Io;
}

KpiSummary kpis(double cov, double rsrp, double sinr, double dl, double ul) {
  KpiSummary k;
  k.coverage_pct = cov;
  k.avg_rsrp_dbm = rsrp;
  k.avg_sinr_db = sinr;
  k.dl_mbps = dl;
  k.ul_mbps = ul;
  k.ticks = 60;
  k.empty = false;
  return k;
}

}  // namespace

TEST_CASE("reward is a weighted sum of scaled deltas") {
  auto base = kpis(90.0, -95.0, 8.0, 40.0, 5.0);
  CHECK(compute_reward(base, base, {1, 1, 1, 1, 1}) == 0.0);
  CHECK(compute_reward(kpis(91.79, -95.0, 8.0, 40.0, 5.0), base, {1, 0, 0, 0, 0}) == doctest::Approx(1.79).epsilon(1e-12));
  CHECK(compute_reward(kpis(90.0, -89.38, 8.0, 40.0, 5.0), base, {0, 1, 0, 0, 0}) == doctest::Approx(5.62).epsilon(1e-12));
  CHECK(compute_reward(kpis(90.0, -95.0, 8.0, 146.24, 5.0), base, {0, 0, 0, 1, 0}) == doctest::Approx(10.624).epsilon(1e-12));

  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    auto k = kpis(rng.uniform(0, 100), rng.uniform(-120, -60), rng.uniform(-5, 25), rng.uniform(0, 80), rng.uniform(0, 20));
    RewardWeights w1{rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()};
    RewardWeights w2{rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()};
    RewardWeights sum{w1.coverage + w2.coverage, w1.rsrp + w2.rsrp, w1.sinr + w2.sinr, w1.dl + w2.dl, w1.ul + w2.ul};
    CHECK(std::abs(compute_reward(k, base, sum) - compute_reward(k, base, w1) - compute_reward(k, base, w2)) < 1e-12);
  }
}

TEST_CASE("weights normalize to unit sum") {
  auto w = normalize_weights({2, 1, 1, 0, 0});
  CHECK(w.coverage == 0.5);
  CHECK(w.rsrp + w.sinr == 0.5);
  CHECK(normalize_weights({1, 0, 0, 0, 0}) == RewardWeights{1, 0, 0, 0, 0});
  CHECK(code_of([] { normalize_weights({0, 0, 0, 0, 0}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { normalize_weights({1, -1, 0, 0, 0}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("actions convert to legal beam settings") {
  auto sites = reference()->sites;
  CHECK(apply_action(sites, noop_action(sites)).sites == sites);

  sites[0].beams[0].tilt_deg = 15.0;
  sites[0].beams[1].azimuth_offset_deg = -59.0;
  auto a = noop_action(sites);
  a[0].tilt_delta = 2;
  a[1].azimuth_delta = -2;
  a[2].tilt_delta = -1;
  auto applied = apply_action(sites, a);
  CHECK(applied.sites[0].beams[0].tilt_deg == 15.0);
  CHECK(applied.sites[0].beams[1].azimuth_offset_deg == -60.0);
  CHECK(applied.sites[0].beams[2].tilt_deg == sites[0].beams[2].tilt_deg - 1.0);
  CHECK(applied.clamped[0]);
  CHECK(applied.clamped[1]);
  CHECK_FALSE(applied.clamped[2]);

  CHECK(code_of([&] { apply_action(sites, ActionSpec(3)); }) == ErrorCode::InvalidArgument);
  auto bad = noop_action(sites);
  bad[4].h_index = 6;
  CHECK(code_of([&] { apply_action(sites, bad); }) == ErrorCode::InvalidArgument);
  bad = noop_action(sites);
  bad[4].azimuth_delta = 3;
  CHECK(code_of([&] { apply_action(sites, bad); }) == ErrorCode::InvalidArgument);

  Rng rng(17);
  auto current = reference()->sites;
  for (int i = 0; i < 2000; ++i) {
    ActionSpec r;
    for (std::size_t b = 0; b < 9; ++b)
      r.push_back({static_cast<int>(rng.index(6)), static_cast<int>(rng.index(3)), static_cast<int>(rng.index(5)) - 2,
                   static_cast<int>(rng.index(5)) - 2, rng.uniform() < 0.8});
    current = apply_action(current, r).sites;
    for (const auto& s : current) CHECK_NOTHROW(validate_site(s));
  }
}

TEST_CASE("state vector layout") {
  Environment env(reference());
  auto s = env.reset(4);
  CHECK(s.size() == 5 * 9 + 64 + 5);
  CHECK(env.state_size() == s.size());
  for (double v : s) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  double density = 0.0;
  for (std::size_t i = 45; i < 45 + 64; ++i) density += s[i];
  CHECK(density == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(env.reset(4) == s);
  CHECK(env.reset(5) != s);
}

TEST_CASE("environment contract") {
  EnvConfig cfg;
  cfg.max_steps = 3;
  Environment env(off_boresight(), cfg);
  CHECK(code_of([&] { env.step(noop_action(env.sites())); }) == ErrorCode::NotReset);
  auto s0 = env.reset(2);
  auto t = env.step(noop_action(env.sites()));
  CHECK(t.reward == 0.0);
  CHECK(t.info.kpis == env.evaluator().baseline());
  CHECK(t.state == s0);
  CHECK(t.next_state == s0);
  CHECK_FALSE(t.done);

  auto off = noop_action(env.sites());
  off[0].active = false;
  auto dark = env.step(off);
  CHECK(dark.info.kpis.coverage_pct < env.evaluator().baseline().coverage_pct);
  CHECK(dark.reward < 0.0);
  CHECK(std::isfinite(dark.reward));

  auto third = env.step(noop_action(env.sites()));
  CHECK(third.done);
  CHECK(third.reward == dark.reward);
  CHECK(code_of([&] { env.step(noop_action(env.sites())); }) == ErrorCode::EpisodeDone);
  env.reset(2);
  CHECK(env.sites() == off_boresight()->sites);
}

TEST_CASE("hill climbing improves the off-boresight scenario") {
  ConfigEvaluator ev(*off_boresight(), 1, {1, 0, 0, 0, 0}, 60);
  CHECK(code_of([&] { hill_climb(ev, 0, 1); }) == ErrorCode::InvalidArgument);
  auto r = hill_climb(ev, 200, 1);
  CHECK(r.best_reward > 0.0);
  CHECK(r.best_sites[0].beams[0].azimuth_offset_deg > 0.0);  // toward the cluster
  CHECK(r.progress.size() <= 200);
  CHECK(std::is_sorted(r.best_trace.begin(), r.best_trace.end()));
  CHECK_FALSE(r.accepted.empty());

  auto replay = off_boresight()->sites;
  for (const auto& a : r.accepted) replay = apply_action(replay, a).sites;
  CHECK(replay == r.best_sites);
  CHECK(hill_climb(ev, 200, 1).progress.size() == r.progress.size());

  auto one = hill_climb(ev, 1, 3);
  CHECK(one.progress.size() == 1);
  auto csv = progress_csv(one);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
  CHECK(csv.rfind(kProgressCsvHeader, 0) == 0);
}

TEST_CASE("cross-entropy bookkeeping") {
  ConfigEvaluator ev(*off_boresight(), 2, {1, 0, 0, 0, 0}, 30);
  CemConfig c;
  c.population = 6;
  c.iters = 0;
  auto first = cross_entropy(ev, c);
  REQUIRE(first.progress.size() == 6);
  double best = first.progress[0].reward;
  for (const auto& p : first.progress) best = std::max(best, p.reward);
  CHECK(first.best_reward == best);
  CHECK(first.progress[0].reward == 0.0);  // the starting configuration

  c.iters = 4;
  auto r = cross_entropy(ev, c);
  CHECK(r.progress.size() == 30);
  CHECK(std::is_sorted(r.best_trace.begin(), r.best_trace.end()));
  CHECK(r.best_reward > 0.0);

  c.population = 3;
  CHECK(code_of([&] { cross_entropy(ev, c); }) == ErrorCode::InvalidArgument);
  c.population = 6;
  c.elite_frac = 0.6;
  CHECK(code_of([&] { cross_entropy(ev, c); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("cross-entropy keeps its distribution when elites tie") {
  Scenario empty = *off_boresight();
  empty.users.clear();
  ConfigEvaluator ev(empty, 1, {1, 0, 0, 0, 0}, 5);
  CemConfig c;
  c.population = 5;
  c.iters = 3;
  auto r = cross_entropy(ev, c);
  CHECK(r.progress.size() == 20);
  for (const auto& p : r.progress) CHECK(p.reward == 0.0);
}

TEST_CASE("cross-entropy matches or beats hill climbing head to head") {
  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    ConfigEvaluator ev(*off_boresight(), seed, {1, 0, 0, 0, 0}, 60);
    CemConfig c;
    c.seed = seed;
    if (cross_entropy(ev, c).best_reward >= hill_climb(ev, 200, seed).best_reward) ++wins;
  }
  MESSAGE("cross-entropy >= hill climbing in ", wins, "/10 seeds");
  CHECK(wins >= 7);
}
