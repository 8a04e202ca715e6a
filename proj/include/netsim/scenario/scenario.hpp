// SPDX-License-Identifier: Apache-2.0
//
// World model: grid, roads, sites with their beams, simulation constants,
// user population and traffic settings, reward weights and the seed.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "netsim/scenario/geo.hpp"

namespace netsim {

// Beamwidth catalogs the base-station emulation accepts.
inline constexpr std::array<double, 6> kHBeamwidthsDeg{15, 30, 45, 65, 90, 110};
inline constexpr std::array<double, 3> kVBeamwidthsDeg{6, 12, 25};

inline constexpr double kAzimuthOffsetMinDeg = -60.0;
inline constexpr double kAzimuthOffsetMaxDeg = 60.0;
inline constexpr double kTiltMinDeg = -2.0;
inline constexpr double kTiltMaxDeg = 15.0;

struct BeamConfig {
  int beam_id = 0;
  double h_beamwidth_deg = 65.0;
  double v_beamwidth_deg = 12.0;
  double azimuth_offset_deg = 0.0;
  double tilt_deg = 0.0;  // electrical, added to the site's mechanical downtilt
  bool active = true;
  double g_max_dbi = 17.0;

  friend bool operator==(const BeamConfig&, const BeamConfig&) = default;
};

// Index of a beamwidth in its catalog, or -1.
int h_beamwidth_index(double deg);
int v_beamwidth_index(double deg);

// Throws OutOfRange naming `context` on any violated beam invariant.
void validate_beam(const BeamConfig& beam, std::string_view context);

struct Site {
  int site_id = 0;
  Point position{};
  double antenna_height_m = 25.0;
  double mechanical_azimuth_deg = 0.0;
  double mechanical_downtilt_deg = 0.0;
  double tx_power_dbm = 46.0;
  double carrier_ghz = 3.5;
  double bandwidth_mhz = 20.0;
  int n_prb = 100;
  std::vector<BeamConfig> beams;

  friend bool operator==(const Site&, const Site&) = default;
};

enum class SchedulerKind { ProportionalFair, RoundRobin };
enum class PathLossKind { Empirical, Learned };

struct SimConstants {
  double noise_figure_db = 9.0;
  double kpi_tick_s = 1.0;
  double shadow_sigma_los_db = 4.0;
  double shadow_sigma_nlos_db = 6.0;
  double decorrelation_m = 50.0;
  double coverage_rsrp_threshold_dbm = -105.0;
  double coverage_sinr_threshold_db = -3.0;
  double max_se_bps_hz = 7.8;
  double overhead = 0.14;
  double ue_tx_power_dbm = 23.0;
  double ue_height_m = 1.5;
  double rician_k_db = 10.0;  // values >= 300 mean a pure line-of-sight coefficient
  double pf_alpha = 0.1;
  SchedulerKind scheduler = SchedulerKind::ProportionalFair;
  PathLossKind path_loss = PathLossKind::Empirical;
  double walk_speed_mps = 1.5;

  friend bool operator==(const SimConstants&, const SimConstants&) = default;
};

enum class Placement { Uniform, Cluster, Model };
enum class Mobility { Static, RandomWalk };

// One group of simulated users.
struct UserGroup {
  int count = 0;
  Placement placement = Placement::Uniform;
  Point center{};
  double radius_m = 100.0;
  Mobility mobility = Mobility::Static;
  double speed_mps = 1.5;
  std::string checkpoint;  // trajectory model, for Placement::Model
  double model_resolution_m = 0.0;  // cell size of the model's token grid; 0 = the scenario grid
  double time_of_day_start_h = 8.0;

  friend bool operator==(const UserGroup&, const UserGroup&) = default;
};

enum class TrafficMode { FullBuffer, Poisson };

struct TrafficConfig {
  TrafficMode mode = TrafficMode::Poisson;
  double session_rate_per_s = 1.0 / 300.0;
  double mean_session_s = 120.0;
  double dl_demand_mbps = 10.0;
  double ul_demand_mbps = 2.0;
  std::string clusters_file;  // optional app/action cluster model (JSON)

  friend bool operator==(const TrafficConfig&, const TrafficConfig&) = default;
};

struct RewardWeights {
  double coverage = 1.0;
  double rsrp = 0.0;
  double sinr = 0.0;
  double dl = 0.0;
  double ul = 0.0;

  friend bool operator==(const RewardWeights&, const RewardWeights&) = default;
};

struct Scenario {
  GeoGrid grid;
  std::optional<GeoReference> geo_reference;
  RoadGraph roads;
  std::vector<Site> sites;
  SimConstants sim;
  std::vector<UserGroup> users;
  TrafficConfig traffic;
  std::optional<RewardWeights> reward;
  std::uint64_t seed = 1;

  std::size_t beam_count() const;
  const Site* find_site(int site_id) const;

  friend bool operator==(const Scenario& a, const Scenario& b);
};

void validate_site(const Site& site);
void validate_scenario(const Scenario& scenario);

// Relative checkpoint and clusters_file paths resolve against the file's directory.
Scenario parse_scenario(const std::string& path);
Scenario parse_scenario_text(std::string_view text);
std::string serialize_scenario(const Scenario& scenario);

}  // namespace netsim
