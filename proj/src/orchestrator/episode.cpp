// SPDX-License-Identifier: Apache-2.0
#include "netsim/orchestrator/episode.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "netsim/error.hpp"
#include "netsim/scenario/structured_text.hpp"

namespace netsim::orchestrator {

namespace {

const Scenario& require_scenario(const SimConfig& config) {
  if (!config.scenario) fail(ErrorCode::MissingField, "SimConfig has no scenario");
  return *config.scenario;
}

}  // namespace

std::vector<Site> apply_overrides(const std::vector<Site>& sites, const std::vector<BeamOverride>& overrides) {
  std::vector<Site> out = sites;
  for (const auto& o : overrides) {
    BeamConfig* target = nullptr;
    for (auto& s : out) {
      if (s.site_id != o.site_id) continue;
      for (auto& b : s.beams)
        if (b.beam_id == o.beam.beam_id) target = &b;
    }
    if (!target)
      fail(ErrorCode::UnknownBeam, fmt::format("override refers to unknown beam {} of site {}", o.beam.beam_id, o.site_id));
    try {
      validate_beam(o.beam, fmt::format("override of site {} beam {}", o.site_id, o.beam.beam_id));
    } catch (const Error& e) {
      fail(ErrorCode::InvalidOverride, e.what());
    }
    *target = o.beam;
  }
  return out;
}

std::vector<BeamOverride> parse_overrides(const std::string& text) {
  auto doc = config::parse(text);
  doc.expect_only({"override"});
  std::vector<BeamOverride> out;
  for (const auto& t : doc.array("override")) {
    t.expect_only({"site_id", "beam_id", "h_beamwidth_deg", "v_beamwidth_deg", "azimuth_offset_deg", "tilt_deg",
                   "active", "g_max_dbi"});
    BeamOverride o;
    o.site_id = static_cast<int>(t.integer("site_id"));
    o.beam.beam_id = static_cast<int>(t.integer("beam_id"));
    o.beam.h_beamwidth_deg = t.number("h_beamwidth_deg");
    o.beam.v_beamwidth_deg = t.number("v_beamwidth_deg");
    o.beam.azimuth_offset_deg = t.number("azimuth_offset_deg");
    o.beam.tilt_deg = t.number("tilt_deg");
    o.beam.active = t.boolean_or("active", true);
    o.beam.g_max_dbi = t.number_or("g_max_dbi", o.beam.g_max_dbi);
    out.push_back(o);
  }
  return out;
}

std::vector<BeamOverride> load_overrides(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, fmt::format("cannot open override file '{}'", path));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_overrides(buf.str());
}

std::string serialize_overrides(const std::vector<BeamOverride>& overrides) {
  config::Writer w;
  for (const auto& o : overrides) {
    w.array_section("override");
    w.integer("site_id", o.site_id);
    w.integer("beam_id", o.beam.beam_id);
    w.number("h_beamwidth_deg", o.beam.h_beamwidth_deg);
    w.number("v_beamwidth_deg", o.beam.v_beamwidth_deg);
    w.number("azimuth_offset_deg", o.beam.azimuth_offset_deg);
    w.number("tilt_deg", o.beam.tilt_deg);
    w.flag("active", o.beam.active);
    w.number("g_max_dbi", o.beam.g_max_dbi);
  }
  return w.str();
}

EpisodeWorld::EpisodeWorld(const Scenario& scenario, std::uint64_t seed, std::int64_t ticks, bool cache_links)
    : scenario_(scenario),
      seed_(seed),
      ticks_(ticks),
      population_(build_population(scenario, seed, ticks)),
      channel_(scenario, seed) {
  if (cache_links) {
    for (std::int64_t t = 0; t < ticks_; ++t) links_.push_back(channel_.site_links(scenario_.sites, users_at(t)));
  }
}

std::vector<channel::ChannelUser> EpisodeWorld::users_at(std::int64_t tick) const {
  const auto& pos = population_.positions.at(static_cast<std::size_t>(tick));
  std::vector<channel::ChannelUser> users(pos.size());
  for (std::size_t u = 0; u < pos.size(); ++u) users[u] = {population_.user_ids[u], pos[u]};
  return users;
}

std::vector<std::vector<channel::SiteLink>> EpisodeWorld::site_links(std::int64_t tick) const {
  if (!links_.empty()) return links_.at(static_cast<std::size_t>(tick));
  return channel_.site_links(scenario_.sites, users_at(tick));
}

Episode::Episode(const SimConfig& config)
    : Episode(std::make_shared<const EpisodeWorld>(
                  require_scenario(config), config.seed, config.episode_ticks),
              config.overrides, config.record) {}

Episode::Episode(std::shared_ptr<const EpisodeWorld> world, const std::vector<BeamOverride>& overrides, bool record)
    : world_(std::move(world)), sites_(apply_overrides(world_->scenario().sites, overrides)), record_(record) {}

net::KpiReport Episode::step_tick() {
  if (finished()) fail(ErrorCode::EpisodeFinished, fmt::format("episode already ran its {} ticks", ticks()));
  const auto& sim = world_->scenario().sim;
  const auto& pop = world_->population();
  auto t = static_cast<std::size_t>(tick_);

  InterfaceRecord r;
  r.tick = tick_;
  r.f3_positions = world_->users_at(tick_);
  r.f2_demand = pop.demand[t];
  r.f1_channel = world_->channel().matrix(sites_, world_->site_links(tick_), r.f3_positions, tick_);
  r.f4_links = net::link_states(r.f1_channel, sites_, sim, pop.user_ids);
  r.scheduler_before = memory_;
  r.allocation = net::schedule_users(r.f4_links, r.f2_demand, sites_, sim, memory_, tick_);
  r.report = net::aggregate_kpis(r.f4_links, r.allocation.dl_bps, r.allocation.ul_bps, sites_, sim, tick_);
  ++tick_;

  auto report = r.report;
  if (record_) records_.push_back(r);
  last_ = std::move(r);
  return report;
}

net::KpiReport replay_tick(const InterfaceRecord& record, const std::vector<Site>& sites, const SimConstants& sim) {
  std::vector<std::uint64_t> ids;
  for (const auto& u : record.f3_positions) ids.push_back(u.id);
  auto links = net::link_states(record.f1_channel, sites, sim, ids);
  if (links != record.f4_links) fail(ErrorCode::SchemaMismatch, "recorded F4 payload does not follow from F1");
  auto memory = record.scheduler_before;
  auto allocation = net::schedule_users(links, record.f2_demand, sites, sim, memory, record.tick);
  return net::aggregate_kpis(links, allocation.dl_bps, allocation.ul_bps, sites, sim, record.tick);
}

KpiSummary summarize(const std::vector<net::KpiReport>& reports) {
  KpiSummary s;
  for (const auto& r : reports) {
    if (r.grid.empty) continue;
    s.coverage_pct += r.grid.coverage_pct;
    s.avg_rsrp_dbm += r.grid.avg_rsrp_dbm;
    s.avg_sinr_db += r.grid.avg_sinr_db;
    s.dl_mbps += r.grid.dl_mbps;
    s.ul_mbps += r.grid.ul_mbps;
    ++s.ticks;
  }
  if (s.ticks == 0) return KpiSummary{};
  double n = static_cast<double>(s.ticks);
  s.coverage_pct /= n;
  s.avg_rsrp_dbm /= n;
  s.avg_sinr_db /= n;
  s.dl_mbps /= n;
  s.ul_mbps /= n;
  s.empty = false;
  return s;
}

SimResult run_episode(std::shared_ptr<const EpisodeWorld> world, const std::vector<BeamOverride>& overrides) {
  Episode ep(world, overrides);
  SimResult result;
  result.seed = world->seed();
  while (!ep.finished()) result.ticks.push_back(ep.step_tick());
  result.summary = summarize(result.ticks);
  if (ep.last_record()) {
    for (const auto& u : ep.last_record()->f3_positions) result.final_positions.push_back(u.position);
  }
  return result;
}

SimResult run_episode(const SimConfig& config) {
  return run_episode(std::make_shared<const EpisodeWorld>(require_scenario(config), config.seed, config.episode_ticks),
                     config.overrides);
}

std::string kpi_csv(const SimResult& result) {
  std::ostringstream out;
  out << net::kKpiCsvHeader << '\n';
  for (const auto& r : result.ticks) net::write_kpi_rows(out, r);
  return out.str();
}

std::string summary_csv(const SimResult& result) {
  using config::format_number;
  const auto& s = result.summary;
  return fmt::format("{}\n{},{},{},{},{},{},{}\n", kSummaryCsvHeader, result.seed, s.ticks, format_number(s.coverage_pct),
                     format_number(s.avg_rsrp_dbm), format_number(s.avg_sinr_db), format_number(s.dl_mbps),
                     format_number(s.ul_mbps));
}

}  // namespace netsim::orchestrator
