// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace netsim {

struct Point {
  double x = 0.0;  // east, meters
  double y = 0.0;  // north, meters

  friend bool operator==(const Point&, const Point&) = default;
};

// Point with an absolute altitude (terrain + height above ground).
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

double distance(Point a, Point b);

using CellToken = std::uint32_t;

// Regular planar grid with optional per-cell terrain elevation.
class GeoGrid {
 public:
  GeoGrid() = default;
  GeoGrid(Point origin, double width_m, double height_m, double resolution_m,
          std::vector<double> terrain_height = {});

  Point origin() const { return origin_; }
  double width() const { return width_; }
  double height() const { return height_; }
  double resolution() const { return resolution_; }
  std::size_t cols() const { return cols_; }
  std::size_t rows() const { return rows_; }
  std::size_t cell_count() const { return cols_ * rows_; }

  // Empty when the terrain is flat zero.
  const std::vector<double>& terrain() const { return terrain_; }
  double max_terrain() const { return max_terrain_; }

  bool contains(Point p) const;
  Point clamp(Point p) const;

  // Row-major cell token; throws OutOfBounds outside the grid.
  CellToken cell_index(Point p) const;
  Point cell_center(CellToken token) const;
  double terrain_at(Point p) const;
  double terrain_of(CellToken token) const;

  friend bool operator==(const GeoGrid&, const GeoGrid&) = default;

 private:
  Point origin_{};
  double width_ = 0.0;
  double height_ = 0.0;
  double resolution_ = 1.0;
  std::size_t cols_ = 0;
  std::size_t rows_ = 0;
  std::vector<double> terrain_;
  double max_terrain_ = 0.0;
};

// True iff the straight segment a->b clears the terrain at every sample taken
// every resolution/2 meters of horizontal distance.
bool los_check(const GeoGrid& grid, Point3 a, Point3 b);

struct RoadEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  double length_m = 0.0;

  friend bool operator==(const RoadEdge&, const RoadEdge&) = default;
};

class RoadGraph {
 public:
  RoadGraph() = default;
  // Edge lengths are derived from node geometry.
  RoadGraph(std::vector<Point> nodes, const std::vector<std::pair<std::size_t, std::size_t>>& edges);

  const std::vector<Point>& nodes() const { return nodes_; }
  const std::vector<RoadEdge>& edges() const { return edges_; }
  bool empty() const { return nodes_.empty(); }

  // Closest node within max_dist_m, if any. Ties resolve to the lower index.
  std::optional<std::size_t> nearest_node(Point p, double max_dist_m) const;
  // Node sequence of a shortest path; empty when unreachable.
  std::vector<std::size_t> shortest_path(std::size_t from, std::size_t to) const;

  friend bool operator==(const RoadGraph& a, const RoadGraph& b) {
    return a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
  }

 private:
  std::vector<Point> nodes_;
  std::vector<RoadEdge> edges_;
  std::vector<std::vector<std::pair<std::size_t, double>>> adjacency_;
};

// Equirectangular projection about a reference latitude/longitude, which maps
// onto `anchor` in planar coordinates.
struct GeoReference {
  double lat0_deg = 0.0;
  double lon0_deg = 0.0;
  Point anchor{};

  static constexpr double kEarthRadiusM = 6371008.8;

  Point project(double lat_deg, double lon_deg) const;
  std::pair<double, double> unproject(Point p) const;

  friend bool operator==(const GeoReference&, const GeoReference&) = default;
};

}  // namespace netsim
