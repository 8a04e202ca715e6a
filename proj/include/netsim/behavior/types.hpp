// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "netsim/scenario/geo.hpp"

namespace netsim::behavior {

using UserId = std::uint64_t;

struct MobilityFix {
  UserId user_id = 0;
  double timestamp_s = 0.0;
  Point position{};
  std::optional<double> altitude_m;

  friend bool operator==(const MobilityFix&, const MobilityFix&) = default;
};

struct TrajectoryStep {
  CellToken location = 0;
  int arrival_bucket = 0;  // hour of day, [0, 24)
  double stay_s = 0.0;     // > 0
  double arrival_s = 0.0;  // absolute arrival time

  friend bool operator==(const TrajectoryStep&, const TrajectoryStep&) = default;
};

struct TrajectorySequence {
  UserId user_id = 0;
  std::vector<TrajectoryStep> steps;

  friend bool operator==(const TrajectorySequence&, const TrajectorySequence&) = default;
};

inline int hour_bucket(double t_s) {
  double day_s = t_s - 86400.0 * static_cast<double>(static_cast<std::int64_t>(t_s / 86400.0));
  if (day_s < 0.0) day_s += 86400.0;
  int b = static_cast<int>(day_s / 3600.0);
  return b < 0 ? 0 : (b > 23 ? 23 : b);
}

enum class Direction { Uplink, Downlink };

struct PacketRecord {
  UserId user_id = 0;
  double timestamp_s = 0.0;
  std::optional<int> app_label;
  int packet_len_bytes = 0;
  Direction direction = Direction::Downlink;

  friend bool operator==(const PacketRecord&, const PacketRecord&) = default;
};

// One subdivided action category of an app.
struct ActionCluster {
  std::array<double, 2> center{};  // mean packet length, mean log inter-arrival
  double weight = 0.0;
  double dl_bps = 0.0;
  double ul_bps = 0.0;
  double mean_duration_s = 0.0;

  friend bool operator==(const ActionCluster&, const ActionCluster&) = default;
};

struct AppClusters {
  int app_index = 0;
  std::vector<ActionCluster> clusters;  // k_i = clusters.size()
  double silhouette = 0.0;

  friend bool operator==(const AppClusters&, const AppClusters&) = default;
};

struct AppActionClusters {
  std::vector<AppClusters> apps;  // n_apps = apps.size()

  std::size_t n_apps() const { return apps.size(); }
  friend bool operator==(const AppActionClusters&, const AppActionClusters&) = default;
};

struct PreferenceVector {
  UserId user_id = 0;
  std::vector<double> app_probs;

  friend bool operator==(const PreferenceVector&, const PreferenceVector&) = default;
};

struct ServiceSession {
  UserId user_id = 0;
  int app_index = 0;
  int action_cluster = 0;
  double start_s = 0.0;
  double duration_s = 0.0;
  double demand_bps = 0.0;     // downlink
  double demand_bps_ul = 0.0;  // uplink

  bool active_at(double t_s) const { return t_s >= start_s && t_s < start_s + duration_s; }
  friend bool operator==(const ServiceSession&, const ServiceSession&) = default;
};

struct GenerationReport {
  double kl_location = 0.0;
  double kl_stay_duration = 0.0;
  double js_location = 0.0;
};

struct CellLoadRecord {
  std::int64_t cell_id = 0;
  double interval_start_s = 0.0;
  double traffic_mb = 0.0;
  int user_count = 0;

  friend bool operator==(const CellLoadRecord&, const CellLoadRecord&) = default;
};

struct Waypoint {
  UserId user_id = 0;
  double t_s = 0.0;
  Point position{};

  friend bool operator==(const Waypoint&, const Waypoint&) = default;
};

}  // namespace netsim::behavior
