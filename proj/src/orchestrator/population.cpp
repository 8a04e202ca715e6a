// SPDX-License-Identifier: Apache-2.0
#include "netsim/orchestrator/population.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include <fmt/format.h>

#include "netsim/behavior/postprocess.hpp"
#include "netsim/behavior/traffic.hpp"
#include "netsim/behavior/trajectory_vae.hpp"
#include "netsim/error.hpp"
#include "netsim/random.hpp"

namespace netsim::orchestrator {

namespace {

constexpr std::uint64_t kPlacementTag = 0x706c6163;
constexpr std::uint64_t kSessionTag = 0x73657373;
constexpr std::uint64_t kModelTag = 0x6d6f646c;
constexpr double kHeadingChangeProbability = 0.1;

Point initial_position(const GeoGrid& grid, const UserGroup& g, Rng& rng) {
  if (g.placement == Placement::Cluster) {
    double r = g.radius_m * std::sqrt(rng.uniform());
    double a = rng.uniform(0.0, 2.0 * std::numbers::pi);
    return grid.clamp({g.center.x + r * std::cos(a), g.center.y + r * std::sin(a)});
  }
  Point o = grid.origin();
  return grid.clamp({o.x + rng.uniform() * grid.width(), o.y + rng.uniform() * grid.height()});
}

// Per-tick track of a static or random-walk user.
std::vector<Point> synthetic_track(const GeoGrid& grid, const UserGroup& g, double tick_s, std::int64_t ticks,
                                   Rng& rng) {
  std::vector<Point> track;
  track.reserve(static_cast<std::size_t>(ticks));
  Point p = initial_position(grid, g, rng);
  double heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
  for (std::int64_t t = 0; t < ticks; ++t) {
    track.push_back(p);
    if (g.mobility != Mobility::RandomWalk) continue;
    if (rng.uniform() < kHeadingChangeProbability) heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
    double step = g.speed_mps * tick_s;
    Point next{p.x + step * std::sin(heading), p.y + step * std::cos(heading)};
    if (!grid.contains(next)) {
      heading += std::numbers::pi;
      next = grid.clamp(next);
    }
    p = next;
  }
  return track;
}

std::vector<std::vector<Point>> model_tracks(const Scenario& sc, const UserGroup& g, std::size_t group,
                                             std::uint64_t first_id, std::uint64_t seed, std::int64_t ticks) {
  auto model = behavior::load_checkpoint(g.checkpoint);
  GeoGrid token_grid = g.model_resolution_m > 0
                           ? GeoGrid(sc.grid.origin(), sc.grid.width(), sc.grid.height(), g.model_resolution_m)
                           : sc.grid;
  if (model.vocab != token_grid.cell_count())
    fail(ErrorCode::InvalidArgument, fmt::format("trajectory model '{}' covers {} cells but the token grid has {}",
                                                 g.checkpoint, model.vocab, token_grid.cell_count()));
  behavior::GenerationConfig gc;
  gc.n_users = static_cast<std::size_t>(g.count);
  gc.steps = model.hyper.max_steps;
  gc.seed = hash_key({seed, group, kModelTag});
  gc.time_of_day_start_h = g.time_of_day_start_h;
  gc.first_user_id = first_id;
  auto seqs = behavior::generate_trajectories(model, gc);
  behavior::PostprocessConfig pc;
  pc.walk_speed_mps = sc.sim.walk_speed_mps;
  pc.tick_s = sc.sim.kpi_tick_s;
  auto waypoints = behavior::postprocess_trajectories(seqs, token_grid, sc.roads, pc);

  std::vector<std::vector<Point>> tracks(waypoints.size());
  for (std::size_t u = 0; u < waypoints.size(); ++u) {
    const auto& w = waypoints[u];
    for (std::int64_t t = 0; t < ticks; ++t) {
      if (w.empty()) {
        tracks[u].push_back(sc.grid.clamp(sc.grid.origin()));
      } else {
        auto i = std::min(static_cast<std::size_t>(t), w.size() - 1);  // hold the last point
        tracks[u].push_back(sc.grid.clamp(w[i].position));
      }
    }
  }
  return tracks;
}

}  // namespace

std::vector<behavior::ServiceSession> cluster_sessions(const TrafficConfig& traffic,
                                                       const std::vector<std::uint64_t>& user_ids, double horizon_s,
                                                       std::uint64_t seed) {
  auto model = behavior::load_traffic_model(traffic.clusters_file);
  if (model.preferences.empty() || user_ids.empty()) return {};
  std::vector<behavior::PreferenceVector> prefs;
  for (std::size_t u = 0; u < user_ids.size(); ++u) {
    auto p = model.preferences[u % model.preferences.size()];
    p.user_id = user_ids[u];
    prefs.push_back(std::move(p));
  }
  behavior::TrafficGenConfig config;
  config.session_rate_per_s = traffic.session_rate_per_s;
  return behavior::generate_traffic(model.clusters, prefs, horizon_s, hash_key({seed, kSessionTag}), config);
}

std::vector<behavior::ServiceSession> poisson_sessions(const TrafficConfig& traffic,
                                                       const std::vector<std::uint64_t>& user_ids, double horizon_s,
                                                       std::uint64_t seed) {
  std::vector<behavior::ServiceSession> out;
  for (auto id : user_ids) {
    Rng rng(hash_key({seed, id, kSessionTag}));
    double t = rng.exponential(traffic.session_rate_per_s);
    while (t < horizon_s) {
      behavior::ServiceSession s;
      s.user_id = id;
      s.start_s = t;
      s.duration_s = rng.exponential(1.0 / traffic.mean_session_s);
      s.demand_bps = traffic.dl_demand_mbps * 1e6;
      s.demand_bps_ul = traffic.ul_demand_mbps * 1e6;
      out.push_back(s);
      t += rng.exponential(traffic.session_rate_per_s);
    }
  }
  return out;
}

std::vector<net::UserDemand> demand_at(const std::vector<behavior::ServiceSession>& sessions,
                                       const std::vector<std::uint64_t>& user_ids, double t_s) {
  std::map<std::uint64_t, std::size_t> column;
  for (std::size_t u = 0; u < user_ids.size(); ++u) column.emplace(user_ids[u], u);
  std::vector<net::UserDemand> out(user_ids.size());
  for (const auto& s : sessions) {
    if (!s.active_at(t_s)) continue;
    auto it = column.find(s.user_id);
    if (it == column.end()) continue;
    out[it->second].dl_bps += s.demand_bps;
    out[it->second].ul_bps += s.demand_bps_ul;
  }
  return out;
}

Population build_population(const Scenario& sc, std::uint64_t seed, std::int64_t ticks) {
  if (ticks < 0) fail(ErrorCode::InvalidArgument, "episode length must be non-negative");
  Population pop;
  std::vector<std::vector<Point>> tracks;  // [user][tick]
  std::uint64_t next_id = 1;
  for (std::size_t g = 0; g < sc.users.size(); ++g) {
    const auto& group = sc.users[g];
    if (group.placement == Placement::Model) {
      for (auto& track : model_tracks(sc, group, g, next_id, seed, ticks)) tracks.push_back(std::move(track));
    } else {
      for (int k = 0; k < group.count; ++k) {
        Rng rng(hash_key({seed, g, static_cast<std::uint64_t>(k), kPlacementTag}));
        tracks.push_back(synthetic_track(sc.grid, group, sc.sim.kpi_tick_s, ticks, rng));
      }
    }
    for (int k = 0; k < group.count; ++k) pop.user_ids.push_back(next_id++);
  }

  auto n_ticks = static_cast<std::size_t>(ticks);
  pop.positions.assign(n_ticks, std::vector<Point>(pop.users()));
  for (std::size_t u = 0; u < pop.users(); ++u)
    for (std::size_t t = 0; t < n_ticks; ++t) pop.positions[t][u] = tracks[u][t];

  double horizon = static_cast<double>(ticks) * sc.sim.kpi_tick_s;
  if (sc.traffic.mode == TrafficMode::FullBuffer) {
    double inf = std::numeric_limits<double>::infinity();
    pop.demand.assign(n_ticks, std::vector<net::UserDemand>(pop.users(), net::UserDemand{inf, inf}));
    return pop;
  }
  pop.sessions = sc.traffic.clusters_file.empty() ? poisson_sessions(sc.traffic, pop.user_ids, horizon, seed)
                                                  : cluster_sessions(sc.traffic, pop.user_ids, horizon, seed);
  for (std::size_t t = 0; t < n_ticks; ++t)
    pop.demand.push_back(demand_at(pop.sessions, pop.user_ids, static_cast<double>(t) * sc.sim.kpi_tick_s));
  return pop;
}

}  // namespace netsim::orchestrator
