// SPDX-License-Identifier: Apache-2.0
//
// CSV stand-ins for the operator data feeds, plus the CSV exports of
// generated trajectories and sessions. Headers must match exactly.
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "netsim/behavior/types.hpp"

namespace netsim::behavior {

inline constexpr std::string_view kMobilityHeader = "user_id,timestamp_s,lat,lon,alt_m";
inline constexpr std::string_view kPacketHeader = "user_id,timestamp_s,app_label,packet_len_bytes,direction";
inline constexpr std::string_view kCellLoadHeader = "cell_id,interval_start_s,traffic_mb,user_count";
inline constexpr std::string_view kWaypointHeader = "user_id,t_s,x_m,y_m";
inline constexpr std::string_view kSessionHeader =
    "user_id,app_index,action_cluster,start_s,duration_s,demand_bps,demand_bps_ul";
inline constexpr std::string_view kSequenceHeader = "user_id,step,location_token,arrival_bucket,stay_s,arrival_s";

std::vector<MobilityFix> ingest_mobility_csv(const std::string& path, const GeoReference& ref);
std::vector<PacketRecord> ingest_packet_csv(const std::string& path);
std::vector<CellLoadRecord> ingest_cell_load_csv(const std::string& path);
std::vector<Waypoint> read_waypoint_csv(const std::string& path);
std::vector<ServiceSession> read_session_csv(const std::string& path);
std::vector<TrajectorySequence> read_sequence_csv(const std::string& path);

void write_mobility_csv(const std::string& path, const std::vector<MobilityFix>& fixes, const GeoReference& ref);
void write_packet_csv(const std::string& path, const std::vector<PacketRecord>& packets);
void write_waypoint_csv(const std::string& path, const std::vector<std::vector<Waypoint>>& tracks);
void write_session_csv(const std::string& path, const std::vector<ServiceSession>& sessions);
void write_sequence_csv(const std::string& path, const std::vector<TrajectorySequence>& sequences);

}  // namespace netsim::behavior
