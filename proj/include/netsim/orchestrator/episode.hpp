// SPDX-License-Identifier: Apache-2.0
//
// Episode driver. Each tick moves data along the emulator interfaces:
// F3 user positions and F2 service demand from the population, F1 large-scale
// links and the channel matrix, F4 RSRP and SINR, then scheduling and KPIs.
// C1 is the SimConfig that starts an episode and C2 the SimResult it returns.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "netsim/channel/large_scale.hpp"
#include "netsim/net/emulator.hpp"
#include "netsim/orchestrator/population.hpp"

namespace netsim::orchestrator {

struct BeamOverride {
  int site_id = 0;
  BeamConfig beam;  // beam.beam_id selects the beam

  friend bool operator==(const BeamOverride&, const BeamOverride&) = default;
};

struct SimConfig {
  std::shared_ptr<const Scenario> scenario;
  std::vector<BeamOverride> overrides;
  std::int64_t episode_ticks = 60;
  std::uint64_t seed = 1;
  bool record = false;  // keep every tick's interface payloads
};

// Copies `sites` with the overrides applied. Throws UnknownBeam for a beam
// that does not exist and InvalidOverride for values outside the beam limits.
std::vector<Site> apply_overrides(const std::vector<Site>& sites, const std::vector<BeamOverride>& overrides);

// Override file: one [[override]] table per beam with site_id, beam_id and
// the beam keys of the scenario format.
std::vector<BeamOverride> parse_overrides(const std::string& text);
std::vector<BeamOverride> load_overrides(const std::string& path);
std::string serialize_overrides(const std::vector<BeamOverride>& overrides);

// Everything about an episode that does not depend on beam settings. Shared
// read-only between episodes that compare configurations on the same users.
class EpisodeWorld {
 public:
  // With `cache_links`, beam-independent site links are computed for every
  // tick up front.
  EpisodeWorld(const Scenario& scenario, std::uint64_t seed, std::int64_t ticks, bool cache_links = false);

  const Scenario& scenario() const { return scenario_; }
  std::uint64_t seed() const { return seed_; }
  std::int64_t ticks() const { return ticks_; }
  const Population& population() const { return population_; }
  const channel::ChannelModel& channel() const { return channel_; }

  std::vector<channel::ChannelUser> users_at(std::int64_t tick) const;
  // Cached links when available, computed otherwise.
  std::vector<std::vector<channel::SiteLink>> site_links(std::int64_t tick) const;

 private:
  Scenario scenario_;
  std::uint64_t seed_;
  std::int64_t ticks_;
  Population population_;
  channel::ChannelModel channel_;
  std::vector<std::vector<std::vector<channel::SiteLink>>> links_;
};

// Interface payloads of one tick.
struct InterfaceRecord {
  std::int64_t tick = 0;
  std::vector<channel::ChannelUser> f3_positions;
  std::vector<net::UserDemand> f2_demand;
  channel::ChannelMatrix f1_channel;  // large-scale terms per link and the tick's coefficients
  std::vector<net::LinkState> f4_links;
  net::SchedulerMemory scheduler_before;
  net::Allocation allocation;
  net::KpiReport report;
};

class Episode {
 public:
  explicit Episode(const SimConfig& config);
  Episode(std::shared_ptr<const EpisodeWorld> world, const std::vector<BeamOverride>& overrides, bool record = false);

  // Throws EpisodeFinished once every tick has run.
  net::KpiReport step_tick();

  std::int64_t tick() const { return tick_; }
  std::int64_t ticks() const { return world_->ticks(); }
  bool finished() const { return tick_ >= world_->ticks(); }
  const std::vector<Site>& sites() const { return sites_; }
  const EpisodeWorld& world() const { return *world_; }
  const std::vector<InterfaceRecord>& records() const { return records_; }
  const std::optional<InterfaceRecord>& last_record() const { return last_; }

 private:
  std::shared_ptr<const EpisodeWorld> world_;
  std::vector<Site> sites_;
  bool record_ = false;
  std::int64_t tick_ = 0;
  net::SchedulerMemory memory_;
  std::vector<InterfaceRecord> records_;
  std::optional<InterfaceRecord> last_;
};

// Recomputes a tick's KPI report from its recorded payloads alone.
net::KpiReport replay_tick(const InterfaceRecord& record, const std::vector<Site>& sites, const SimConstants& sim);

struct KpiSummary {
  double coverage_pct = 0.0;
  double avg_rsrp_dbm = 0.0;
  double avg_sinr_db = 0.0;
  double dl_mbps = 0.0;
  double ul_mbps = 0.0;
  std::size_t ticks = 0;  // non-empty ticks averaged
  bool empty = true;

  friend bool operator==(const KpiSummary&, const KpiSummary&) = default;
};

// Per-metric mean of the grid rows over non-empty ticks.
KpiSummary summarize(const std::vector<net::KpiReport>& reports);

struct SimResult {
  std::vector<net::KpiReport> ticks;
  KpiSummary summary;
  std::vector<Point> final_positions;
  std::uint64_t seed = 0;

  friend bool operator==(const SimResult&, const SimResult&) = default;
};

SimResult run_episode(const SimConfig& config);
SimResult run_episode(std::shared_ptr<const EpisodeWorld> world, const std::vector<BeamOverride>& overrides);

inline constexpr const char* kSummaryCsvHeader = "seed,ticks,coverage_pct,avg_rsrp_dbm,avg_sinr_db,dl_mbps,ul_mbps";

std::string kpi_csv(const SimResult& result);
std::string summary_csv(const SimResult& result);

}  // namespace netsim::orchestrator
