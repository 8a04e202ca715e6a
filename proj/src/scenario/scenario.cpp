// SPDX-License-Identifier: Apache-2.0
#include "netsim/scenario/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "netsim/error.hpp"
#include "netsim/scenario/structured_text.hpp"

namespace netsim {
namespace {

[[noreturn]] void out_of_range(std::string_view field, double value, std::string_view bounds) {
  fail(ErrorCode::OutOfRange, fmt::format("{} = {} not in {}", field, value, bounds));
}

void check_range(std::string_view field, double value, double lo, double hi) {
  if (!(value >= lo && value <= hi)) out_of_range(field, value, fmt::format("[{}, {}]", lo, hi));
}

void check_positive(std::string_view field, double value) {
  if (!(value > 0.0) || !std::isfinite(value)) out_of_range(field, value, "(0, inf)");
}

template <typename Enum, std::size_t N>
using NameTable = std::array<std::pair<std::string_view, Enum>, N>;

template <typename Enum, std::size_t N>
Enum parse_enum(const config::Table& t, std::string_view key, Enum fallback, const NameTable<Enum, N>& names) {
  if (!t.has(key)) return fallback;
  std::string v = t.string(key);
  std::string allowed;
  for (auto [name, e] : names) {
    if (name == v) return e;
    allowed += allowed.empty() ? std::string(name) : ", " + std::string(name);
  }
  fail(ErrorCode::OutOfRange, fmt::format("{}.{} = \"{}\" not in {{{}}}", t.name, key, v, allowed));
}

template <typename Enum, std::size_t N>
std::string_view enum_name(Enum e, const NameTable<Enum, N>& names) {
  for (auto [name, value] : names) {
    if (value == e) return name;
  }
  return "";
}

constexpr NameTable<SchedulerKind, 2> kSchedulerNames{{
    {"pf", SchedulerKind::ProportionalFair}, {"rr", SchedulerKind::RoundRobin}}};
constexpr NameTable<PathLossKind, 2> kPathLossNames{{
    {"empirical", PathLossKind::Empirical}, {"learned", PathLossKind::Learned}}};
constexpr NameTable<Placement, 3> kPlacementNames{{
    {"uniform", Placement::Uniform}, {"cluster", Placement::Cluster}, {"model", Placement::Model}}};
constexpr NameTable<Mobility, 2> kMobilityNames{{
    {"static", Mobility::Static}, {"random_walk", Mobility::RandomWalk}}};
constexpr NameTable<TrafficMode, 2> kTrafficNames{{
    {"full_buffer", TrafficMode::FullBuffer}, {"poisson", TrafficMode::Poisson}}};

GeoGrid parse_grid(const config::Table& t, std::optional<GeoReference>& ref) {
  t.expect_only({"origin_x", "origin_y", "width_m", "height_m", "resolution_m", "terrain", "ref_lat", "ref_lon"});
  Point origin{t.number_or("origin_x", 0.0), t.number_or("origin_y", 0.0)};
  double width = t.number_or("width_m", 2000.0);
  double height = t.number_or("height_m", 2000.0);
  double res = t.number_or("resolution_m", 10.0);
  std::vector<double> terrain;
  if (t.has("terrain")) terrain = t.numbers("terrain");
  GeoGrid grid(origin, width, height, res, std::move(terrain));
  if (t.has("ref_lat") != t.has("ref_lon")) {
    fail(ErrorCode::MissingField, "grid.ref_lat and grid.ref_lon must be given together");
  }
  if (t.has("ref_lat")) {
    GeoReference r;
    r.lat0_deg = t.number("ref_lat");
    r.lon0_deg = t.number("ref_lon");
    check_range("grid.ref_lat", r.lat0_deg, -89.0, 89.0);
    check_range("grid.ref_lon", r.lon0_deg, -180.0, 180.0);
    r.anchor = {origin.x + width / 2.0, origin.y + height / 2.0};
    ref = r;
  }
  return grid;
}

RoadGraph parse_roads(const config::Table& t) {
  t.expect_only({"nodes", "edges"});
  std::vector<Point> nodes;
  for (const auto& row : t.number_rows("nodes")) {
    if (row.size() != 2) fail(ErrorCode::OutOfRange, "roads.nodes entries must be [x, y]");
    nodes.push_back({row[0], row[1]});
  }
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  if (t.has("edges")) {
    for (const auto& row : t.number_rows("edges")) {
      if (row.size() != 2 || row[0] < 0 || row[1] < 0 || row[0] != std::floor(row[0]) ||
          row[1] != std::floor(row[1])) {
        fail(ErrorCode::OutOfRange, "roads.edges entries must be [i, j] node indices");
      }
      edges.emplace_back(static_cast<std::size_t>(row[0]), static_cast<std::size_t>(row[1]));
    }
  }
  return RoadGraph(std::move(nodes), edges);
}

BeamConfig parse_beam(const config::Table& t) {
  t.expect_only({"beam_id", "h_beamwidth_deg", "v_beamwidth_deg", "azimuth_offset_deg", "tilt_deg", "active",
                 "g_max_dbi"});
  BeamConfig b;
  b.beam_id = static_cast<int>(t.integer("beam_id"));
  b.h_beamwidth_deg = t.number_or("h_beamwidth_deg", b.h_beamwidth_deg);
  b.v_beamwidth_deg = t.number_or("v_beamwidth_deg", b.v_beamwidth_deg);
  b.azimuth_offset_deg = t.number_or("azimuth_offset_deg", b.azimuth_offset_deg);
  b.tilt_deg = t.number_or("tilt_deg", b.tilt_deg);
  b.active = t.boolean_or("active", b.active);
  b.g_max_dbi = t.number_or("g_max_dbi", b.g_max_dbi);
  validate_beam(b, fmt::format("beam {}", b.beam_id));
  return b;
}

Site parse_site(const config::Table& t) {
  t.expect_only({"site_id", "x", "y", "antenna_height_m", "mechanical_azimuth_deg", "mechanical_downtilt_deg",
                 "tx_power_dbm", "carrier_ghz", "bandwidth_mhz", "n_prb", "beam"});
  Site s;
  s.site_id = static_cast<int>(t.integer("site_id"));
  s.position = {t.number("x"), t.number("y")};
  s.antenna_height_m = t.number_or("antenna_height_m", s.antenna_height_m);
  s.mechanical_azimuth_deg = t.number_or("mechanical_azimuth_deg", s.mechanical_azimuth_deg);
  s.mechanical_downtilt_deg = t.number_or("mechanical_downtilt_deg", s.mechanical_downtilt_deg);
  s.tx_power_dbm = t.number_or("tx_power_dbm", s.tx_power_dbm);
  s.carrier_ghz = t.number_or("carrier_ghz", s.carrier_ghz);
  s.bandwidth_mhz = t.number_or("bandwidth_mhz", s.bandwidth_mhz);
  s.n_prb = static_cast<int>(t.integer_or("n_prb", s.n_prb));
  if (auto it = t.children.find("beam"); it != t.children.end()) {
    for (const auto& bt : it->second) s.beams.push_back(parse_beam(bt));
  }
  validate_site(s);
  return s;
}

SimConstants parse_sim(const config::Table& t) {
  t.expect_only({"noise_figure_db", "kpi_tick_s", "shadow_sigma_los_db", "shadow_sigma_nlos_db", "decorrelation_m",
                 "coverage_rsrp_threshold_dbm", "coverage_sinr_threshold_db", "max_se_bps_hz", "overhead",
                 "ue_tx_power_dbm", "ue_height_m", "rician_k_db", "pf_alpha", "scheduler", "path_loss",
                 "walk_speed_mps"});
  SimConstants c;
  c.noise_figure_db = t.number_or("noise_figure_db", c.noise_figure_db);
  c.kpi_tick_s = t.number_or("kpi_tick_s", c.kpi_tick_s);
  c.shadow_sigma_los_db = t.number_or("shadow_sigma_los_db", c.shadow_sigma_los_db);
  c.shadow_sigma_nlos_db = t.number_or("shadow_sigma_nlos_db", c.shadow_sigma_nlos_db);
  c.decorrelation_m = t.number_or("decorrelation_m", c.decorrelation_m);
  c.coverage_rsrp_threshold_dbm = t.number_or("coverage_rsrp_threshold_dbm", c.coverage_rsrp_threshold_dbm);
  c.coverage_sinr_threshold_db = t.number_or("coverage_sinr_threshold_db", c.coverage_sinr_threshold_db);
  c.max_se_bps_hz = t.number_or("max_se_bps_hz", c.max_se_bps_hz);
  c.overhead = t.number_or("overhead", c.overhead);
  c.ue_tx_power_dbm = t.number_or("ue_tx_power_dbm", c.ue_tx_power_dbm);
  c.ue_height_m = t.number_or("ue_height_m", c.ue_height_m);
  c.rician_k_db = t.number_or("rician_k_db", c.rician_k_db);
  c.pf_alpha = t.number_or("pf_alpha", c.pf_alpha);
  c.scheduler = parse_enum(t, "scheduler", c.scheduler, kSchedulerNames);
  c.path_loss = parse_enum(t, "path_loss", c.path_loss, kPathLossNames);
  c.walk_speed_mps = t.number_or("walk_speed_mps", c.walk_speed_mps);

  check_range("sim.noise_figure_db", c.noise_figure_db, 0.0, 30.0);
  check_positive("sim.kpi_tick_s", c.kpi_tick_s);
  check_range("sim.shadow_sigma_los_db", c.shadow_sigma_los_db, 0.0, 20.0);
  check_range("sim.shadow_sigma_nlos_db", c.shadow_sigma_nlos_db, 0.0, 20.0);
  check_positive("sim.decorrelation_m", c.decorrelation_m);
  check_range("sim.coverage_rsrp_threshold_dbm", c.coverage_rsrp_threshold_dbm, -180.0, -20.0);
  check_range("sim.coverage_sinr_threshold_db", c.coverage_sinr_threshold_db, -30.0, 50.0);
  check_positive("sim.max_se_bps_hz", c.max_se_bps_hz);
  check_range("sim.overhead", c.overhead, 0.0, 0.99);
  check_range("sim.ue_tx_power_dbm", c.ue_tx_power_dbm, -40.0, 40.0);
  check_range("sim.ue_height_m", c.ue_height_m, 0.0, 100.0);
  check_range("sim.rician_k_db", c.rician_k_db, -50.0, 1000.0);
  check_range("sim.pf_alpha", c.pf_alpha, 1e-6, 1.0);
  check_positive("sim.walk_speed_mps", c.walk_speed_mps);
  return c;
}

UserGroup parse_users(const config::Table& t, const GeoGrid& grid) {
  t.expect_only({"count", "placement", "center_x", "center_y", "radius_m", "mobility", "speed_mps", "checkpoint",
                 "model_resolution_m", "time_of_day_start_h"});
  UserGroup g;
  g.count = static_cast<int>(t.integer("count"));
  g.placement = parse_enum(t, "placement", g.placement, kPlacementNames);
  g.center = {t.number_or("center_x", grid.origin().x + grid.width() / 2.0),
              t.number_or("center_y", grid.origin().y + grid.height() / 2.0)};
  g.radius_m = t.number_or("radius_m", g.radius_m);
  g.mobility = parse_enum(t, "mobility", g.mobility, kMobilityNames);
  g.speed_mps = t.number_or("speed_mps", g.speed_mps);
  g.checkpoint = t.string_or("checkpoint", "");
  g.time_of_day_start_h = t.number_or("time_of_day_start_h", g.time_of_day_start_h);
  g.model_resolution_m = t.number_or("model_resolution_m", 0.0);
  if (g.model_resolution_m != 0.0)
    check_range("users.model_resolution_m", g.model_resolution_m, grid.resolution(),
                std::min(grid.width(), grid.height()));
  check_range("users.count", g.count, 0, 1e6);
  check_positive("users.radius_m", g.radius_m);
  check_positive("users.speed_mps", g.speed_mps);
  check_range("users.time_of_day_start_h", g.time_of_day_start_h, 0.0, 23.999999);
  if (!grid.contains(g.center)) out_of_range("users.center", g.center.x, "grid bounds");
  if (g.placement == Placement::Model && g.checkpoint.empty()) {
    fail(ErrorCode::MissingField, "users.checkpoint is required for placement = \"model\"");
  }
  return g;
}

TrafficConfig parse_traffic(const config::Table& t) {
  t.expect_only({"mode", "session_rate_per_s", "mean_session_s", "dl_demand_mbps", "ul_demand_mbps", "clusters_file"});
  TrafficConfig c;
  c.mode = parse_enum(t, "mode", c.mode, kTrafficNames);
  c.session_rate_per_s = t.number_or("session_rate_per_s", c.session_rate_per_s);
  c.mean_session_s = t.number_or("mean_session_s", c.mean_session_s);
  c.dl_demand_mbps = t.number_or("dl_demand_mbps", c.dl_demand_mbps);
  c.ul_demand_mbps = t.number_or("ul_demand_mbps", c.ul_demand_mbps);
  c.clusters_file = t.string_or("clusters_file", "");
  check_positive("traffic.session_rate_per_s", c.session_rate_per_s);
  check_positive("traffic.mean_session_s", c.mean_session_s);
  check_positive("traffic.dl_demand_mbps", c.dl_demand_mbps);
  check_positive("traffic.ul_demand_mbps", c.ul_demand_mbps);
  return c;
}

RewardWeights parse_reward(const config::Table& t) {
  t.expect_only({"w_coverage", "w_rsrp", "w_sinr", "w_dl", "w_ul"});
  RewardWeights w;
  w.coverage = t.number_or("w_coverage", 0.0);
  w.rsrp = t.number_or("w_rsrp", 0.0);
  w.sinr = t.number_or("w_sinr", 0.0);
  w.dl = t.number_or("w_dl", 0.0);
  w.ul = t.number_or("w_ul", 0.0);
  for (auto [name, v] : {std::pair{"reward.w_coverage", w.coverage}, {"reward.w_rsrp", w.rsrp},
                         {"reward.w_sinr", w.sinr}, {"reward.w_dl", w.dl}, {"reward.w_ul", w.ul}}) {
    check_range(name, v, 0.0, 1e9);
  }
  if (w.coverage + w.rsrp + w.sinr + w.dl + w.ul <= 0.0) {
    fail(ErrorCode::OutOfRange, "reward weights: at least one weight must be > 0");
  }
  return w;
}

}  // namespace

int h_beamwidth_index(double deg) {
  auto it = std::find(kHBeamwidthsDeg.begin(), kHBeamwidthsDeg.end(), deg);
  return it == kHBeamwidthsDeg.end() ? -1 : static_cast<int>(it - kHBeamwidthsDeg.begin());
}

int v_beamwidth_index(double deg) {
  auto it = std::find(kVBeamwidthsDeg.begin(), kVBeamwidthsDeg.end(), deg);
  return it == kVBeamwidthsDeg.end() ? -1 : static_cast<int>(it - kVBeamwidthsDeg.begin());
}

void validate_beam(const BeamConfig& b, std::string_view context) {
  if (h_beamwidth_index(b.h_beamwidth_deg) < 0) {
    out_of_range(fmt::format("{}: h_beamwidth_deg", context), b.h_beamwidth_deg, "{15,30,45,65,90,110}");
  }
  if (v_beamwidth_index(b.v_beamwidth_deg) < 0) {
    out_of_range(fmt::format("{}: v_beamwidth_deg", context), b.v_beamwidth_deg, "{6,12,25}");
  }
  check_range(fmt::format("{}: azimuth_offset_deg", context), b.azimuth_offset_deg, kAzimuthOffsetMinDeg,
              kAzimuthOffsetMaxDeg);
  check_range(fmt::format("{}: tilt_deg", context), b.tilt_deg, kTiltMinDeg, kTiltMaxDeg);
  check_range(fmt::format("{}: g_max_dbi", context), b.g_max_dbi, -10.0, 40.0);
}

void validate_site(const Site& s) {
  auto ctx = [&](std::string_view f) { return fmt::format("site {}: {}", s.site_id, f); };
  if (!std::isfinite(s.position.x) || !std::isfinite(s.position.y)) out_of_range(ctx("position"), s.position.x, "finite");
  check_positive(ctx("antenna_height_m"), s.antenna_height_m);
  if (!(s.mechanical_azimuth_deg >= 0.0 && s.mechanical_azimuth_deg < 360.0)) {
    out_of_range(ctx("mechanical_azimuth_deg"), s.mechanical_azimuth_deg, "[0, 360)");
  }
  check_range(ctx("mechanical_downtilt_deg"), s.mechanical_downtilt_deg, -10.0, 30.0);
  check_range(ctx("tx_power_dbm"), s.tx_power_dbm, 0.0, 60.0);
  check_positive(ctx("carrier_ghz"), s.carrier_ghz);
  check_positive(ctx("bandwidth_mhz"), s.bandwidth_mhz);
  if (s.n_prb <= 0) out_of_range(ctx("n_prb"), s.n_prb, "(0, inf)");
  if (s.beams.empty()) fail(ErrorCode::MissingField, ctx("at least one [[site.beam]] is required"));
  std::set<int> ids;
  for (const auto& b : s.beams) {
    if (!ids.insert(b.beam_id).second) {
      fail(ErrorCode::OutOfRange, ctx(fmt::format("duplicate beam_id {}", b.beam_id)));
    }
    validate_beam(b, ctx(fmt::format("beam {}", b.beam_id)));
  }
}

void validate_scenario(const Scenario& sc) {
  if (sc.sites.empty()) fail(ErrorCode::MissingField, "at least one [[site]] is required");
  std::set<int> ids;
  for (const auto& s : sc.sites) {
    validate_site(s);
    if (!ids.insert(s.site_id).second) fail(ErrorCode::OutOfRange, fmt::format("duplicate site_id {}", s.site_id));
    if (!sc.grid.contains(s.position)) {
      fail(ErrorCode::OutOfRange, fmt::format("site {} position ({}, {}) outside grid", s.site_id, s.position.x,
                                              s.position.y));
    }
  }
}

std::size_t Scenario::beam_count() const {
  std::size_t n = 0;
  for (const auto& s : sites) n += s.beams.size();
  return n;
}

const Site* Scenario::find_site(int site_id) const {
  for (const auto& s : sites) {
    if (s.site_id == site_id) return &s;
  }
  return nullptr;
}

bool operator==(const Scenario& a, const Scenario& b) {
  return a.grid == b.grid && a.geo_reference == b.geo_reference && a.roads == b.roads && a.sites == b.sites &&
         a.sim == b.sim && a.users == b.users && a.traffic == b.traffic && a.reward == b.reward && a.seed == b.seed;
}

Scenario parse_scenario_text(std::string_view text) {
  config::Document doc = config::parse(text);
  doc.expect_only({"scenario", "grid", "roads", "site", "sim", "users", "traffic", "reward"});
  Scenario sc;
  if (const auto* t = doc.table("scenario")) {
    t->expect_only({"seed"});
    double seed = t->number_or("seed", 1.0);
    if (seed < 0 || seed != std::floor(seed) || seed > 9.007199254740992e15) {
      out_of_range("scenario.seed", seed, "non-negative integer");
    }
    sc.seed = static_cast<std::uint64_t>(seed);
  }
  const config::Table* grid = doc.table("grid");
  if (grid == nullptr) fail(ErrorCode::MissingField, "[grid] section");
  sc.grid = parse_grid(*grid, sc.geo_reference);
  if (const auto* t = doc.table("roads")) sc.roads = parse_roads(*t);
  for (const auto& t : doc.array("site")) sc.sites.push_back(parse_site(t));
  if (const auto* t = doc.table("sim")) sc.sim = parse_sim(*t);
  for (const auto& t : doc.array("users")) sc.users.push_back(parse_users(t, sc.grid));
  if (const auto* t = doc.table("traffic")) sc.traffic = parse_traffic(*t);
  if (const auto* t = doc.table("reward")) sc.reward = parse_reward(*t);
  validate_scenario(sc);
  return sc;
}

Scenario parse_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, fmt::format("cannot open scenario '{}'", path));
  std::stringstream buf;
  buf << in.rdbuf();
  Scenario sc = parse_scenario_text(buf.str());
  // Referenced files are relative to the scenario file.
  auto base = std::filesystem::path(path).parent_path();
  auto resolve = [&](std::string& file) {
    if (!file.empty() && std::filesystem::path(file).is_relative()) file = (base / file).lexically_normal().string();
  };
  for (auto& g : sc.users) resolve(g.checkpoint);
  resolve(sc.traffic.clusters_file);
  return sc;
}

std::string serialize_scenario(const Scenario& sc) {
  config::Writer w;
  w.section("scenario");
  w.integer("seed", static_cast<std::int64_t>(sc.seed));

  w.section("grid");
  w.number("origin_x", sc.grid.origin().x);
  w.number("origin_y", sc.grid.origin().y);
  w.number("width_m", sc.grid.width());
  w.number("height_m", sc.grid.height());
  w.number("resolution_m", sc.grid.resolution());
  if (!sc.grid.terrain().empty()) w.list("terrain", sc.grid.terrain());
  if (sc.geo_reference) {
    w.number("ref_lat", sc.geo_reference->lat0_deg);
    w.number("ref_lon", sc.geo_reference->lon0_deg);
  }

  if (!sc.roads.empty()) {
    w.section("roads");
    std::vector<std::vector<double>> nodes;
    for (auto p : sc.roads.nodes()) nodes.push_back({p.x, p.y});
    w.rows("nodes", nodes);
    std::vector<std::vector<double>> edges;
    for (const auto& e : sc.roads.edges()) edges.push_back({double(e.a), double(e.b)});
    w.rows("edges", edges);
  }

  for (const auto& s : sc.sites) {
    w.array_section("site");
    w.integer("site_id", s.site_id);
    w.number("x", s.position.x);
    w.number("y", s.position.y);
    w.number("antenna_height_m", s.antenna_height_m);
    w.number("mechanical_azimuth_deg", s.mechanical_azimuth_deg);
    w.number("mechanical_downtilt_deg", s.mechanical_downtilt_deg);
    w.number("tx_power_dbm", s.tx_power_dbm);
    w.number("carrier_ghz", s.carrier_ghz);
    w.number("bandwidth_mhz", s.bandwidth_mhz);
    w.integer("n_prb", s.n_prb);
    for (const auto& b : s.beams) {
      w.array_section("site.beam");
      w.integer("beam_id", b.beam_id);
      w.number("h_beamwidth_deg", b.h_beamwidth_deg);
      w.number("v_beamwidth_deg", b.v_beamwidth_deg);
      w.number("azimuth_offset_deg", b.azimuth_offset_deg);
      w.number("tilt_deg", b.tilt_deg);
      w.flag("active", b.active);
      w.number("g_max_dbi", b.g_max_dbi);
    }
  }

  const auto& c = sc.sim;
  w.section("sim");
  w.number("noise_figure_db", c.noise_figure_db);
  w.number("kpi_tick_s", c.kpi_tick_s);
  w.number("shadow_sigma_los_db", c.shadow_sigma_los_db);
  w.number("shadow_sigma_nlos_db", c.shadow_sigma_nlos_db);
  w.number("decorrelation_m", c.decorrelation_m);
  w.number("coverage_rsrp_threshold_dbm", c.coverage_rsrp_threshold_dbm);
  w.number("coverage_sinr_threshold_db", c.coverage_sinr_threshold_db);
  w.number("max_se_bps_hz", c.max_se_bps_hz);
  w.number("overhead", c.overhead);
  w.number("ue_tx_power_dbm", c.ue_tx_power_dbm);
  w.number("ue_height_m", c.ue_height_m);
  w.number("rician_k_db", c.rician_k_db);
  w.number("pf_alpha", c.pf_alpha);
  w.text("scheduler", enum_name(c.scheduler, kSchedulerNames));
  w.text("path_loss", enum_name(c.path_loss, kPathLossNames));
  w.number("walk_speed_mps", c.walk_speed_mps);

  for (const auto& g : sc.users) {
    w.array_section("users");
    w.integer("count", g.count);
    w.text("placement", enum_name(g.placement, kPlacementNames));
    w.number("center_x", g.center.x);
    w.number("center_y", g.center.y);
    w.number("radius_m", g.radius_m);
    w.text("mobility", enum_name(g.mobility, kMobilityNames));
    w.number("speed_mps", g.speed_mps);
    if (!g.checkpoint.empty()) w.text("checkpoint", g.checkpoint);
    if (g.model_resolution_m != 0.0) w.number("model_resolution_m", g.model_resolution_m);
    w.number("time_of_day_start_h", g.time_of_day_start_h);
  }

  const auto& tr = sc.traffic;
  w.section("traffic");
  w.text("mode", enum_name(tr.mode, kTrafficNames));
  w.number("session_rate_per_s", tr.session_rate_per_s);
  w.number("mean_session_s", tr.mean_session_s);
  w.number("dl_demand_mbps", tr.dl_demand_mbps);
  w.number("ul_demand_mbps", tr.ul_demand_mbps);
  if (!tr.clusters_file.empty()) w.text("clusters_file", tr.clusters_file);

  if (sc.reward) {
    w.section("reward");
    w.number("w_coverage", sc.reward->coverage);
    w.number("w_rsrp", sc.reward->rsrp);
    w.number("w_sinr", sc.reward->sinr);
    w.number("w_dl", sc.reward->dl);
    w.number("w_ul", sc.reward->ul);
  }
  return w.str();
}

}  // namespace netsim
