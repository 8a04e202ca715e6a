// SPDX-License-Identifier: Apache-2.0
//
// One tick of the base-station emulation: measurements, per-beam scheduling
// in both directions, delivered rates and the KPI report.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "netsim/net/kpi.hpp"
#include "netsim/net/link_budget.hpp"
#include "netsim/net/scheduler.hpp"

namespace netsim::net {

struct UserDemand {
  double dl_bps = 0.0;
  double ul_bps = 0.0;

  friend bool operator==(const UserDemand&, const UserDemand&) = default;
};

// Smoothed delivered rates per user column, carried across ticks.
struct SchedulerMemory {
  std::vector<double> dl_avg_bps;
  std::vector<double> ul_avg_bps;

  friend bool operator==(const SchedulerMemory&, const SchedulerMemory&) = default;
};

struct Allocation {
  std::vector<int> dl_prbs;
  std::vector<int> ul_prbs;
  std::vector<double> dl_bps;
  std::vector<double> ul_bps;

  friend bool operator==(const Allocation&, const Allocation&) = default;
};

// Schedules every active beam over the users it serves and updates `memory`.
Allocation schedule_users(std::span<const LinkState> links, std::span<const UserDemand> demand,
                          const std::vector<Site>& sites, const SimConstants& sim, SchedulerMemory& memory,
                          std::int64_t tick);

struct NetTick {
  std::vector<LinkState> links;
  Allocation allocation;
  KpiReport report;
};

NetTick run_network_tick(const ChannelMatrix& m, const std::vector<Site>& sites, const SimConstants& sim,
                         std::span<const std::uint64_t> user_ids, std::span<const UserDemand> demand,
                         SchedulerMemory& memory, std::int64_t tick);

}  // namespace netsim::net
