// SPDX-License-Identifier: Apache-2.0
#include <chrono>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "doctest.h"
#include "netsim/behavior/synthetic.hpp"
#include "netsim/behavior/traffic.hpp"
#include "netsim/behavior/trajectory_vae.hpp"
#include "netsim/error.hpp"
#include "netsim/orchestrator/episode.hpp"
#include "temp_dir.hpp"

using namespace netsim;
using namespace netsim::orchestrator;

namespace {

std::shared_ptr<const Scenario> reference() {
  static auto sc = std::make_shared<const Scenario>(parse_scenario(NETSIM_SCENARIO_DIR "/reference.toml"));
  return sc;
}

Scenario single_cell(int users, Mobility mobility = Mobility::Static) {
  Scenario sc;
  sc.grid = GeoGrid({0.0, 0.0}, 1000.0, 1000.0, 10.0);
  Site site;
  site.site_id = 1;
  site.position = {500.0, 300.0};
  site.beams = {BeamConfig{0}};
  sc.sites = {site};
  UserGroup g;
  g.count = users;
  g.placement = Placement::Cluster;
  g.center = {500.0, 600.0};
  g.radius_m = 100.0;
  g.mobility = mobility;
  sc.users = {g};
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

}  // namespace

TEST_CASE("overrides apply locally and are validated") {
  const auto& sites = reference()->sites;
  CHECK(apply_overrides(sites, {}) == sites);

  BeamOverride o{2, sites[1].beams[1]};
  o.beam.tilt_deg = 6.0;
  auto changed = apply_overrides(sites, {o});
  CHECK(changed[1].beams[1].tilt_deg == 6.0);
  changed[1].beams[1].tilt_deg = sites[1].beams[1].tilt_deg;
  CHECK(changed == sites);

  BeamOverride unknown{2, BeamConfig{99}};
  CHECK(code_of([&] { apply_overrides(sites, {unknown}); }) == ErrorCode::UnknownBeam);
  BeamOverride bad = o;
  bad.beam.tilt_deg = 40.0;
  CHECK(code_of([&] { apply_overrides(sites, {bad}); }) == ErrorCode::InvalidOverride);
  bad.beam.tilt_deg = 6.0;
  bad.beam.h_beamwidth_deg = 70.0;
  CHECK(code_of([&] { apply_overrides(sites, {bad}); }) == ErrorCode::InvalidOverride);
}

TEST_CASE("override files round-trip") {
  std::vector<BeamOverride> ov{{1, BeamConfig{0, 30.0, 6.0, -12.0, 3.0, false, 17.0}},
                               {3, BeamConfig{2, 110.0, 25.0, 0.1, -2.0, true, 15.5}}};
  auto text = serialize_overrides(ov);
  CHECK(parse_overrides(text) == ov);
  test::TempDir dir;
  CHECK(load_overrides(dir.write("o.toml", text)) == ov);
  CHECK(code_of([&] { load_overrides(dir.file("missing.toml")); }) == ErrorCode::Io);
  CHECK(code_of([&] { parse_overrides("[[override]]\nsite_id = 1\nbeam_id = 0\nh_beamwidth_deg = 65\n"); }) ==
        ErrorCode::MissingField);
}

TEST_CASE("static single user sees the same positions every tick") {
  SimConfig c;
  c.scenario = std::make_shared<const Scenario>(single_cell(1));
  c.episode_ticks = 5;
  c.record = true;
  Episode ep(c);
  while (!ep.finished()) ep.step_tick();
  REQUIRE(ep.records().size() == 5);
  for (const auto& r : ep.records()) CHECK(r.f3_positions == ep.records().front().f3_positions);
  CHECK(code_of([&] { ep.step_tick(); }) == ErrorCode::EpisodeFinished);
}

TEST_CASE("users without a session get no rate") {
  Scenario sc = single_cell(20, Mobility::RandomWalk);
  sc.traffic.mode = TrafficMode::Poisson;
  sc.traffic.session_rate_per_s = 0.02;
  sc.traffic.mean_session_s = 20.0;
  SimConfig c{std::make_shared<const Scenario>(sc), {}, 60, 3, true};
  Episode ep(c);
  while (!ep.finished()) ep.step_tick();
  std::size_t idle = 0, busy = 0;
  for (const auto& r : ep.records()) {
    for (std::size_t u = 0; u < r.f2_demand.size(); ++u) {
      if (r.f2_demand[u].dl_bps == 0.0) {
        ++idle;
        CHECK(r.allocation.dl_bps[u] == 0.0);
        CHECK(r.allocation.dl_prbs[u] == 0);
      } else {
        ++busy;
        CHECK(r.allocation.dl_bps[u] <= r.f2_demand[u].dl_bps);
      }
    }
  }
  CHECK(idle > 0);
  CHECK(busy > 0);
}

TEST_CASE("KPIs replay from recorded interface payloads") {
  SimConfig c{reference(), {}, 8, 21, true};
  Episode ep(c);
  while (!ep.finished()) ep.step_tick();
  for (const auto& r : ep.records()) {
    CHECK(replay_tick(r, ep.sites(), reference()->sim) == r.report);
    REQUIRE(r.f1_channel.users == r.f3_positions.size());
    CHECK(r.f1_channel.rows() == 9);
  }
  auto tampered = ep.records()[3];
  tampered.f4_links[0].sinr_db += 1.0;
  CHECK(code_of([&] { replay_tick(tampered, ep.sites(), reference()->sim); }) == ErrorCode::SchemaMismatch);
}

TEST_CASE("episodes are deterministic and summaries are tick means") {
  SimConfig c{reference(), {}, 10, 5, false};
  auto a = run_episode(c);
  auto b = run_episode(c);
  CHECK(a == b);
  REQUIRE(a.ticks.size() == 10);
  CHECK(a.final_positions.size() == 50);
  CHECK(a.seed == 5);
  double cov = 0.0, rsrp = 0.0, dl = 0.0;
  for (const auto& t : a.ticks) {
    cov += t.grid.coverage_pct;
    rsrp += t.grid.avg_rsrp_dbm;
    dl += t.grid.dl_mbps;
  }
  CHECK(a.summary.coverage_pct == doctest::Approx(cov / 10.0).epsilon(1e-14));
  CHECK(a.summary.avg_rsrp_dbm == doctest::Approx(rsrp / 10.0).epsilon(1e-14));
  CHECK(a.summary.dl_mbps == doctest::Approx(dl / 10.0).epsilon(1e-14));
  CHECK(a.summary.ticks == 10);

  c.seed = 6;
  CHECK(run_episode(c).ticks != a.ticks);

  c.episode_ticks = 0;
  auto empty = run_episode(c);
  CHECK(empty.ticks.empty());
  CHECK(empty.summary.empty);
  CHECK(empty.final_positions.empty());
}

TEST_CASE("cached and computed links give identical episodes") {
  auto cached = std::make_shared<const EpisodeWorld>(*reference(), 9, 6, true);
  auto plain = std::make_shared<const EpisodeWorld>(*reference(), 9, 6, false);
  BeamOverride o{1, reference()->sites[0].beams[2]};
  o.beam.azimuth_offset_deg = 10.0;
  CHECK(run_episode(cached, {o}) == run_episode(plain, {o}));
}

TEST_CASE("beam changes only move KPIs through the channel") {
  auto world = std::make_shared<const EpisodeWorld>(*reference(), 4, 5, true);
  BeamOverride off{3, reference()->sites[2].beams[1]};
  off.beam.active = false;
  Episode a(world, {}, true), b(world, {off}, true);
  while (!a.finished()) {
    a.step_tick();
    b.step_tick();
  }
  for (std::size_t t = 0; t < 5; ++t) {
    CHECK(a.records()[t].f3_positions == b.records()[t].f3_positions);
    CHECK(a.records()[t].f2_demand == b.records()[t].f2_demand);
    for (const auto& l : b.records()[t].f4_links) CHECK_FALSE((l.site_id == 3 && l.beam_id == 1));
  }
}

TEST_CASE("population groups, ids and traffic") {
  Scenario sc = single_cell(4);
  UserGroup walkers;
  walkers.count = 3;
  walkers.mobility = Mobility::RandomWalk;
  walkers.speed_mps = 2.0;
  sc.users.push_back(walkers);
  sc.traffic.mode = TrafficMode::FullBuffer;
  auto pop = build_population(sc, 1, 30);
  CHECK(pop.user_ids == std::vector<std::uint64_t>{1, 2, 3, 4, 5, 6, 7});
  REQUIRE(pop.positions.size() == 30);
  for (std::size_t t = 0; t < 30; ++t) {
    for (std::size_t u = 0; u < 7; ++u) {
      CHECK(sc.grid.contains(pop.positions[t][u]));
      CHECK(std::isinf(pop.demand[t][u].dl_bps));
    }
    for (std::size_t u = 0; u < 4; ++u) {
      CHECK(pop.positions[t][u] == pop.positions[0][u]);
      CHECK(distance(pop.positions[t][u], sc.users[0].center) <= 100.0 + 1e-9);
    }
    if (t > 0)
      for (std::size_t u = 4; u < 7; ++u) CHECK(distance(pop.positions[t][u], pop.positions[t - 1][u]) <= 2.0 + 1e-9);
  }

  behavior::ServiceSession s{2, 0, 0, 10.0, 5.0, 1e6, 2e5};
  auto d = demand_at({s, s}, {1, 2}, 12.0);
  CHECK(d[0].dl_bps == 0.0);
  CHECK(d[1].dl_bps == 2e6);
  CHECK(demand_at({s}, {1, 2}, 15.0)[1].dl_bps == 0.0);

  TrafficConfig tc;
  tc.session_rate_per_s = 0.05;
  tc.mean_session_s = 30.0;
  auto sessions = poisson_sessions(tc, {1, 2, 3}, 10000.0, 8);
  double mean_duration = 0.0;
  for (const auto& x : sessions) mean_duration += x.duration_s / sessions.size();
  CHECK(sessions.size() == doctest::Approx(1500.0).epsilon(0.1));
  CHECK(mean_duration == doctest::Approx(30.0).epsilon(0.1));
}

TEST_CASE("population from a trajectory model and a traffic model") {
  test::TempDir dir;
  behavior::CommuteCorpusConfig cc;
  auto grid = behavior::commute_grid(cc);
  behavior::VaeHyperParams hp;
  hp.hidden_dim = 8;
  hp.location_embed = 4;
  hp.latent_dim = 2;
  hp.max_steps = 6;
  auto model = behavior::init_trajectory_model(hp, grid.cell_count(), 3);
  behavior::save_checkpoint(model, dir.file("m.ckpt"));

  behavior::TrafficModel tm;
  tm.clusters.apps = {behavior::AppClusters{0, {behavior::ActionCluster{{0.0, 0.0}, 1.0, 2e6, 1e5, 30.0}}, 0.0}};
  tm.preferences = {behavior::PreferenceVector{1, {1.0}}};
  behavior::save_traffic_model(tm, dir.file("t.json"));

  std::string text = fmt::format(
      "[grid]\nwidth_m = {}\nheight_m = {}\nresolution_m = {}\n"
      "[[site]]\nsite_id = 1\nx = 1000\ny = 1000\n[[site.beam]]\nbeam_id = 0\n"
      "[[users]]\ncount = 5\nplacement = \"model\"\ncheckpoint = \"m.ckpt\"\n"
      "[traffic]\nmode = \"poisson\"\nsession_rate_per_s = 0.05\nclusters_file = \"t.json\"\n",
      cc.width_m, cc.height_m, cc.resolution_m);
  auto sc = parse_scenario(dir.write("s.toml", text));
  CHECK(sc.users[0].checkpoint == dir.file("m.ckpt"));
  auto pop = build_population(sc, 2, 120);
  CHECK(pop.users() == 5);
  for (const auto& tick : pop.positions)
    for (const auto& p : tick) CHECK(sc.grid.contains(p));
  CHECK_FALSE(pop.sessions.empty());
  for (const auto& s : pop.sessions) CHECK(s.user_id >= 1);
  CHECK(build_population(sc, 2, 120).positions == pop.positions);

  sc.grid = GeoGrid({0.0, 0.0}, 1000.0, 1000.0, 10.0);
  sc.sites[0].position = {500.0, 500.0};
  CHECK(code_of([&] { build_population(sc, 2, 10); }) == ErrorCode::InvalidArgument);

  // A fine radio grid with the model's tokens on a coarser grid of the same extent.
  std::string fine = fmt::format(
      "[grid]\nwidth_m = {}\nheight_m = {}\nresolution_m = 10\n"
      "[[site]]\nsite_id = 1\nx = 1000\ny = 1000\n[[site.beam]]\nbeam_id = 0\n"
      "[[users]]\ncount = 4\nplacement = \"model\"\ncheckpoint = \"m.ckpt\"\nmodel_resolution_m = {}\n",
      cc.width_m, cc.height_m, cc.resolution_m);
  auto fine_sc = parse_scenario(dir.write("fine.toml", fine));
  CHECK(fine_sc.users[0].model_resolution_m == cc.resolution_m);
  CHECK(parse_scenario_text(serialize_scenario(fine_sc)) == fine_sc);
  auto fine_pop = build_population(fine_sc, 2, 30);
  CHECK(fine_pop.users() == 4);
  for (const auto& tick : fine_pop.positions)
    for (const auto& p : tick) CHECK(fine_sc.grid.contains(p));
  auto too_fine = fine;
  too_fine.replace(too_fine.find("model_resolution_m = 200"), 24, "model_resolution_m = 5");
  CHECK(code_of([&] { parse_scenario_text(too_fine); }) == ErrorCode::OutOfRange);
}

TEST_CASE("reference tick stays within budget") {
  auto world = std::make_shared<const EpisodeWorld>(*reference(), 1, 20);
  Episode ep(world, {});
  ep.step_tick();
  auto start = std::chrono::steady_clock::now();
  int n = 0;
  while (!ep.finished()) {
    ep.step_tick();
    ++n;
  }
  double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count() / n;
  MESSAGE("mean tick ", ms, " ms");
  CHECK(ms < 100.0);
}
