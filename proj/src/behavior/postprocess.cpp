// SPDX-License-Identifier: Apache-2.0
#include "netsim/behavior/postprocess.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "netsim/error.hpp"

namespace netsim::behavior {

namespace {

// Point at arc length s along a polyline.
Point along(const std::vector<Point>& path, const std::vector<double>& cumulative, double s) {
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), s);
  std::size_t seg = it == cumulative.begin() ? 0 : static_cast<std::size_t>(it - cumulative.begin()) - 1;
  if (seg + 1 >= path.size()) return path.back();
  double len = cumulative[seg + 1] - cumulative[seg];
  double f = len > 0.0 ? (s - cumulative[seg]) / len : 0.0;
  const Point& a = path[seg];
  const Point& b = path[seg + 1];
  return {a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)};
}

std::vector<Point> transit_path(Point from, Point to, const RoadGraph& roads, double snap_m) {
  if (!roads.empty()) {
    auto na = roads.nearest_node(from, snap_m);
    auto nb = roads.nearest_node(to, snap_m);
    if (na && nb) {
      auto nodes = roads.shortest_path(*na, *nb);
      if (!nodes.empty()) {
        std::vector<Point> path{from};
        for (auto n : nodes) path.push_back(roads.nodes()[n]);
        path.push_back(to);
        return path;
      }
    }
  }
  return {from, to};
}

}  // namespace

std::vector<std::vector<Waypoint>> postprocess_trajectories(const std::vector<TrajectorySequence>& sequences,
                                                            const GeoGrid& grid, const RoadGraph& roads,
                                                            const PostprocessConfig& config) {
  if (!(config.walk_speed_mps > 0.0) || !(config.tick_s > 0.0) || config.road_snap_m < 0.0) {
    fail(ErrorCode::InvalidArgument, "postprocess speed and tick must be positive");
  }
  auto snap = [&](Point p) {
    if (!roads.empty()) {
      if (auto n = roads.nearest_node(p, config.road_snap_m)) return roads.nodes()[*n];
    }
    return p;
  };

  std::vector<std::vector<Waypoint>> tracks;
  tracks.reserve(sequences.size());
  for (const auto& seq : sequences) {
    std::vector<Waypoint> track;
    double t = seq.steps.empty() ? 0.0 : seq.steps.front().arrival_s;
    auto emit = [&](Point p) {
      track.push_back({seq.user_id, t, snap(grid.clamp(p))});
      t += config.tick_s;
    };
    for (std::size_t i = 0; i < seq.steps.size(); ++i) {
      const auto& step = seq.steps[i];
      if (step.location >= grid.cell_count()) {
        fail(ErrorCode::OutOfBounds, fmt::format("location token {} outside the grid", step.location));
      }
      Point center = grid.cell_center(step.location);
      auto hold = std::max<long long>(1, std::llround(step.stay_s / config.tick_s));
      for (long long k = 0; k < hold; ++k) emit(center);
      if (i + 1 == seq.steps.size()) break;
      Point next = grid.cell_center(seq.steps[i + 1].location);
      auto path = transit_path(center, next, roads, config.road_snap_m);
      std::vector<double> cumulative{0.0};
      for (std::size_t j = 1; j < path.size(); ++j) cumulative.push_back(cumulative.back() + distance(path[j - 1], path[j]));
      double length = cumulative.back();
      if (length <= 0.0) continue;
      auto n = static_cast<long long>(std::ceil(length / (config.walk_speed_mps * config.tick_s) - 1e-9));
      for (long long k = 1; k <= n; ++k) {
        emit(along(path, cumulative, length * static_cast<double>(k) / static_cast<double>(n + 1)));
      }
    }
    tracks.push_back(std::move(track));
  }
  return tracks;
}

}  // namespace netsim::behavior
