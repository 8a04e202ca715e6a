// SPDX-License-Identifier: Apache-2.0
#include "netsim/behavior/ingest.hpp"

#include <fmt/core.h>

#include "netsim/csv.hpp"
#include "netsim/error.hpp"
#include "netsim/scenario/structured_text.hpp"

namespace netsim::behavior {

namespace {

using config::format_number;

UserId parse_user(const csv::Row& row) {
  long long v = csv::parse_integer(row, 0);
  if (v < 0) fail(ErrorCode::BadRow, fmt::format("line {}: negative user_id", row.line));
  return static_cast<UserId>(v);
}

double parse_time(const csv::Row& row, std::size_t column) {
  double t = csv::parse_double(row, column);
  if (t < 0.0) fail(ErrorCode::BadRow, fmt::format("line {}: negative timestamp", row.line));
  return t;
}

}  // namespace

std::vector<MobilityFix> ingest_mobility_csv(const std::string& path, const GeoReference& ref) {
  auto table = csv::read(path, kMobilityHeader);
  std::vector<MobilityFix> fixes;
  fixes.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    MobilityFix fix;
    fix.user_id = parse_user(row);
    fix.timestamp_s = parse_time(row, 1);
    double lat = csv::parse_double(row, 2);
    double lon = csv::parse_double(row, 3);
    if (lat < -90.0 || lat > 90.0) fail(ErrorCode::BadRow, fmt::format("line {}: latitude {} out of range", row.line, lat));
    if (lon < -180.0 || lon > 180.0) {
      fail(ErrorCode::BadRow, fmt::format("line {}: longitude {} out of range", row.line, lon));
    }
    fix.position = ref.project(lat, lon);
    if (!row.fields[4].empty()) fix.altitude_m = csv::parse_double(row, 4);
    fixes.push_back(fix);
  }
  return fixes;
}

std::vector<PacketRecord> ingest_packet_csv(const std::string& path) {
  auto table = csv::read(path, kPacketHeader);
  std::vector<PacketRecord> packets;
  packets.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    PacketRecord p;
    p.user_id = parse_user(row);
    p.timestamp_s = parse_time(row, 1);
    if (!row.fields[2].empty()) {
      long long app = csv::parse_integer(row, 2);
      if (app < 0) fail(ErrorCode::BadRow, fmt::format("line {}: negative app_label", row.line));
      p.app_label = static_cast<int>(app);
    }
    long long len = csv::parse_integer(row, 3);
    if (len < 1 || len > 65535) {
      fail(ErrorCode::BadRow, fmt::format("line {}: packet_len_bytes {} outside [1, 65535]", row.line, len));
    }
    p.packet_len_bytes = static_cast<int>(len);
    const auto& dir = row.fields[4];
    if (dir == "UL") {
      p.direction = Direction::Uplink;
    } else if (dir == "DL") {
      p.direction = Direction::Downlink;
    } else {
      fail(ErrorCode::BadRow, fmt::format("line {}: direction '{}' is not UL or DL", row.line, dir));
    }
    packets.push_back(p);
  }
  return packets;
}

std::vector<CellLoadRecord> ingest_cell_load_csv(const std::string& path) {
  auto table = csv::read(path, kCellLoadHeader);
  std::vector<CellLoadRecord> records;
  for (const auto& row : table.rows) {
    CellLoadRecord r;
    r.cell_id = csv::parse_integer(row, 0);
    r.interval_start_s = parse_time(row, 1);
    r.traffic_mb = csv::parse_double(row, 2);
    long long users = csv::parse_integer(row, 3);
    if (r.traffic_mb < 0.0 || users < 0) fail(ErrorCode::BadRow, fmt::format("line {}: negative load", row.line));
    r.user_count = static_cast<int>(users);
    records.push_back(r);
  }
  return records;
}

std::vector<Waypoint> read_waypoint_csv(const std::string& path) {
  auto table = csv::read(path, kWaypointHeader);
  std::vector<Waypoint> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    out.push_back({parse_user(row), parse_time(row, 1), {csv::parse_double(row, 2), csv::parse_double(row, 3)}});
  }
  return out;
}

std::vector<ServiceSession> read_session_csv(const std::string& path) {
  auto table = csv::read(path, kSessionHeader);
  std::vector<ServiceSession> out;
  for (const auto& row : table.rows) {
    ServiceSession s;
    s.user_id = parse_user(row);
    s.app_index = static_cast<int>(csv::parse_integer(row, 1));
    s.action_cluster = static_cast<int>(csv::parse_integer(row, 2));
    s.start_s = parse_time(row, 3);
    s.duration_s = csv::parse_double(row, 4);
    s.demand_bps = csv::parse_double(row, 5);
    s.demand_bps_ul = csv::parse_double(row, 6);
    if (s.duration_s <= 0.0 || s.demand_bps <= 0.0 || s.demand_bps_ul <= 0.0) {
      fail(ErrorCode::BadRow, fmt::format("line {}: durations and demands must be positive", row.line));
    }
    out.push_back(s);
  }
  return out;
}

std::vector<TrajectorySequence> read_sequence_csv(const std::string& path) {
  auto table = csv::read(path, kSequenceHeader);
  std::vector<TrajectorySequence> out;
  long long last_step = -1;
  for (const auto& row : table.rows) {
    UserId user = parse_user(row);
    long long step = csv::parse_integer(row, 1);
    if (step == 0) {
      out.push_back({user, {}});
    } else if (out.empty() || out.back().user_id != user || step != last_step + 1) {
      fail(ErrorCode::BadRow, fmt::format("line {}: step {} does not continue a sequence", row.line, step));
    }
    last_step = step;
    TrajectoryStep s;
    long long token = csv::parse_integer(row, 2);
    long long bucket = csv::parse_integer(row, 3);
    if (token < 0 || bucket < 0 || bucket > 23) fail(ErrorCode::BadRow, fmt::format("line {}: bad token or bucket", row.line));
    s.location = static_cast<CellToken>(token);
    s.arrival_bucket = static_cast<int>(bucket);
    s.stay_s = csv::parse_double(row, 4);
    s.arrival_s = parse_time(row, 5);
    if (s.stay_s <= 0.0) fail(ErrorCode::BadRow, fmt::format("line {}: stay must be positive", row.line));
    out.back().steps.push_back(s);
  }
  return out;
}

void write_mobility_csv(const std::string& path, const std::vector<MobilityFix>& fixes, const GeoReference& ref) {
  std::string text = fmt::format("{}\n", kMobilityHeader);
  for (const auto& f : fixes) {
    auto [lat, lon] = ref.unproject(f.position);
    text += fmt::format("{},{},{},{},{}\n", f.user_id, format_number(f.timestamp_s), format_number(lat),
                        format_number(lon), f.altitude_m ? format_number(*f.altitude_m) : std::string());
  }
  csv::write_file(path, text);
}

void write_packet_csv(const std::string& path, const std::vector<PacketRecord>& packets) {
  std::string text = fmt::format("{}\n", kPacketHeader);
  for (const auto& p : packets) {
    text += fmt::format("{},{},{},{},{}\n", p.user_id, format_number(p.timestamp_s),
                        p.app_label ? std::to_string(*p.app_label) : std::string(), p.packet_len_bytes,
                        p.direction == Direction::Uplink ? "UL" : "DL");
  }
  csv::write_file(path, text);
}

void write_waypoint_csv(const std::string& path, const std::vector<std::vector<Waypoint>>& tracks) {
  std::string text = fmt::format("{}\n", kWaypointHeader);
  for (const auto& track : tracks) {
    for (const auto& w : track) {
      text += fmt::format("{},{},{},{}\n", w.user_id, format_number(w.t_s), format_number(w.position.x),
                          format_number(w.position.y));
    }
  }
  csv::write_file(path, text);
}

void write_session_csv(const std::string& path, const std::vector<ServiceSession>& sessions) {
  std::string text = fmt::format("{}\n", kSessionHeader);
  for (const auto& s : sessions) {
    text += fmt::format("{},{},{},{},{},{},{}\n", s.user_id, s.app_index, s.action_cluster, format_number(s.start_s),
                        format_number(s.duration_s), format_number(s.demand_bps), format_number(s.demand_bps_ul));
  }
  csv::write_file(path, text);
}

void write_sequence_csv(const std::string& path, const std::vector<TrajectorySequence>& sequences) {
  std::string text = fmt::format("{}\n", kSequenceHeader);
  for (const auto& seq : sequences) {
    for (std::size_t i = 0; i < seq.steps.size(); ++i) {
      const auto& s = seq.steps[i];
      text += fmt::format("{},{},{},{},{},{}\n", seq.user_id, i, s.location, s.arrival_bucket, format_number(s.stay_s),
                          format_number(s.arrival_s));
    }
  }
  csv::write_file(path, text);
}

}  // namespace netsim::behavior
