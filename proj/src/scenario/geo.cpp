// SPDX-License-Identifier: Apache-2.0
#include "netsim/scenario/geo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <tuple>

#include <fmt/format.h>

#include "netsim/error.hpp"

namespace netsim {

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

GeoGrid::GeoGrid(Point origin, double width_m, double height_m, double resolution_m,
                 std::vector<double> terrain_height)
    : origin_(origin), width_(width_m), height_(height_m), resolution_(resolution_m),
      terrain_(std::move(terrain_height)) {
  if (!(resolution_m > 0.0) || !std::isfinite(resolution_m)) {
    fail(ErrorCode::OutOfRange, fmt::format("grid.resolution_m = {} must be > 0", resolution_m));
  }
  if (!(width_m >= resolution_m) || !(height_m >= resolution_m)) {
    fail(ErrorCode::OutOfRange,
         fmt::format("grid extent {}x{} must be at least one cell of {} m", width_m, height_m, resolution_m));
  }
  cols_ = static_cast<std::size_t>(std::ceil(width_m / resolution_m - 1e-9));
  rows_ = static_cast<std::size_t>(std::ceil(height_m / resolution_m - 1e-9));
  if (!terrain_.empty() && terrain_.size() != cols_ * rows_) {
    fail(ErrorCode::OutOfRange,
         fmt::format("grid.terrain has {} values, expected {}", terrain_.size(), cols_ * rows_));
  }
  for (double h : terrain_) {
    if (!std::isfinite(h)) fail(ErrorCode::OutOfRange, "grid.terrain contains a non-finite value");
    max_terrain_ = std::max(max_terrain_, h);
  }
}

bool GeoGrid::contains(Point p) const {
  return p.x >= origin_.x && p.x <= origin_.x + width_ && p.y >= origin_.y && p.y <= origin_.y + height_;
}

Point GeoGrid::clamp(Point p) const {
  return {std::clamp(p.x, origin_.x, origin_.x + width_), std::clamp(p.y, origin_.y, origin_.y + height_)};
}

CellToken GeoGrid::cell_index(Point p) const {
  if (!contains(p)) {
    fail(ErrorCode::OutOfBounds, fmt::format("point ({}, {}) outside grid", p.x, p.y));
  }
  auto col = static_cast<std::size_t>((p.x - origin_.x) / resolution_);
  auto row = static_cast<std::size_t>((p.y - origin_.y) / resolution_);
  col = std::min(col, cols_ - 1);
  row = std::min(row, rows_ - 1);
  return static_cast<CellToken>(row * cols_ + col);
}

Point GeoGrid::cell_center(CellToken token) const {
  if (token >= cell_count()) fail(ErrorCode::OutOfBounds, fmt::format("cell token {} out of range", token));
  std::size_t row = token / cols_;
  std::size_t col = token % cols_;
  // Edge cells of a non-divisible extent are truncated; center on the clipped cell.
  double x0 = origin_.x + col * resolution_;
  double y0 = origin_.y + row * resolution_;
  double x1 = std::min(x0 + resolution_, origin_.x + width_);
  double y1 = std::min(y0 + resolution_, origin_.y + height_);
  return {(x0 + x1) / 2.0, (y0 + y1) / 2.0};
}

double GeoGrid::terrain_at(Point p) const { return terrain_.empty() ? 0.0 : terrain_[cell_index(p)]; }

double GeoGrid::terrain_of(CellToken token) const {
  if (token >= cell_count()) fail(ErrorCode::OutOfBounds, fmt::format("cell token {} out of range", token));
  return terrain_.empty() ? 0.0 : terrain_[token];
}

bool los_check(const GeoGrid& grid, Point3 a, Point3 b) {
  if (!grid.contains({a.x, a.y}) || !grid.contains({b.x, b.y})) {
    fail(ErrorCode::OutOfBounds, "los_check endpoint outside grid");
  }
  if (grid.terrain().empty() || std::min(a.z, b.z) >= grid.max_terrain()) return true;
  // Canonical endpoint order keeps the test bit-symmetric.
  if (std::tie(b.x, b.y, b.z) < std::tie(a.x, a.y, a.z)) std::swap(a, b);
  double horizontal = std::hypot(b.x - a.x, b.y - a.y);
  double step = grid.resolution() / 2.0;
  auto n = static_cast<std::size_t>(std::ceil(horizontal / step));
  for (std::size_t k = 1; k < n; ++k) {
    double s = static_cast<double>(k) / static_cast<double>(n);
    Point p{a.x + s * (b.x - a.x), a.y + s * (b.y - a.y)};
    double ray_z = a.z + s * (b.z - a.z);
    if (grid.terrain_at(p) > ray_z) return false;
  }
  return true;
}

RoadGraph::RoadGraph(std::vector<Point> nodes, const std::vector<std::pair<std::size_t, std::size_t>>& edges)
    : nodes_(std::move(nodes)), adjacency_(nodes_.size()) {
  for (auto [a, b] : edges) {
    if (a >= nodes_.size() || b >= nodes_.size()) {
      fail(ErrorCode::OutOfRange, fmt::format("road edge ({}, {}) references a missing node", a, b));
    }
    double len = distance(nodes_[a], nodes_[b]);
    edges_.push_back({a, b, len});
    adjacency_[a].emplace_back(b, len);
    adjacency_[b].emplace_back(a, len);
  }
}

std::optional<std::size_t> RoadGraph::nearest_node(Point p, double max_dist_m) const {
  std::optional<std::size_t> best;
  double best_d = max_dist_m;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    double d = distance(p, nodes_[i]);
    if (d < best_d || (d == best_d && !best)) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

std::vector<std::size_t> RoadGraph::shortest_path(std::size_t from, std::size_t to) const {
  if (from >= nodes_.size() || to >= nodes_.size()) return {};
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(nodes_.size(), inf);
  std::vector<std::size_t> prev(nodes_.size(), nodes_.size());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist[from] = 0.0;
  open.emplace(0.0, from);
  while (!open.empty()) {
    auto [d, u] = open.top();
    open.pop();
    if (d > dist[u]) continue;
    if (u == to) break;
    for (auto [v, w] : adjacency_[u]) {
      if (d + w < dist[v]) {
        dist[v] = d + w;
        prev[v] = u;
        open.emplace(dist[v], v);
      }
    }
  }
  if (dist[to] == inf) return {};
  std::vector<std::size_t> path{to};
  while (path.back() != from) path.push_back(prev[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

Point GeoReference::project(double lat_deg, double lon_deg) const {
  constexpr double deg = std::numbers::pi / 180.0;
  double x = kEarthRadiusM * (lon_deg - lon0_deg) * deg * std::cos(lat0_deg * deg);
  double y = kEarthRadiusM * (lat_deg - lat0_deg) * deg;
  return {anchor.x + x, anchor.y + y};
}

std::pair<double, double> GeoReference::unproject(Point p) const {
  constexpr double deg = std::numbers::pi / 180.0;
  double lat = lat0_deg + (p.y - anchor.y) / (kEarthRadiusM * deg);
  double lon = lon0_deg + (p.x - anchor.x) / (kEarthRadiusM * deg * std::cos(lat0_deg * deg));
  return {lat, lon};
}

}  // namespace netsim
