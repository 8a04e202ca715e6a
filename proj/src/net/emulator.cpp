// SPDX-License-Identifier: Apache-2.0
#include "netsim/net/emulator.hpp"

#include <map>

#include "netsim/error.hpp"

namespace netsim::net {

namespace {

void schedule_direction(const std::map<std::size_t, std::vector<std::size_t>>& by_row,
                        std::span<const LinkState> links, std::span<const UserDemand> demand,
                        const std::vector<Site>& sites, const SimConstants& sim, bool uplink,
                        std::vector<double>& average, std::vector<int>& prbs, std::vector<double>& rates,
                        std::int64_t tick) {
  for (const auto& [row, members] : by_row) {
    std::vector<SchedUser> users;
    users.reserve(members.size());
    for (auto u : members) {
      double sinr = uplink ? links[u].ul_sinr_db : links[u].sinr_db;
      users.push_back({rate_per_prb_bps(sinr, sim), uplink ? demand[u].ul_bps : demand[u].dl_bps, average[u]});
    }
    int n_prb = 0;
    for (const auto& s : sites)
      if (s.site_id == links[members.front()].site_id) n_prb = s.n_prb;
    auto granted = schedule(users, n_prb, sim.scheduler, sim.pf_alpha, tick);
    for (std::size_t k = 0; k < members.size(); ++k) {
      auto u = members[k];
      double sinr = uplink ? links[u].ul_sinr_db : links[u].sinr_db;
      prbs[u] = granted[k];
      rates[u] = user_throughput_bps(granted[k], sinr, sim, users[k].demand_bps);
    }
  }
  for (std::size_t u = 0; u < links.size(); ++u) average[u] = smoothed_average(average[u], rates[u], sim.pf_alpha);
}

}  // namespace

Allocation schedule_users(std::span<const LinkState> links, std::span<const UserDemand> demand,
                          const std::vector<Site>& sites, const SimConstants& sim, SchedulerMemory& memory,
                          std::int64_t tick) {
  std::size_t n = links.size();
  if (demand.size() != n) fail(ErrorCode::ShapeMismatch, "demands do not match the link states");
  memory.dl_avg_bps.resize(n, 0.0);
  memory.ul_avg_bps.resize(n, 0.0);

  std::map<std::size_t, std::vector<std::size_t>> by_row;
  for (std::size_t u = 0; u < n; ++u)
    if (links[u].attached) by_row[links[u].serving_row].push_back(u);

  Allocation a;
  a.dl_prbs.assign(n, 0);
  a.ul_prbs.assign(n, 0);
  a.dl_bps.assign(n, 0.0);
  a.ul_bps.assign(n, 0.0);
  schedule_direction(by_row, links, demand, sites, sim, false, memory.dl_avg_bps, a.dl_prbs, a.dl_bps, tick);
  schedule_direction(by_row, links, demand, sites, sim, true, memory.ul_avg_bps, a.ul_prbs, a.ul_bps, tick);
  return a;
}

NetTick run_network_tick(const ChannelMatrix& m, const std::vector<Site>& sites, const SimConstants& sim,
                         std::span<const std::uint64_t> user_ids, std::span<const UserDemand> demand,
                         SchedulerMemory& memory, std::int64_t tick) {
  NetTick out;
  out.links = link_states(m, sites, sim, user_ids);
  out.allocation = schedule_users(out.links, demand, sites, sim, memory, tick);
  out.report = aggregate_kpis(out.links, out.allocation.dl_bps, out.allocation.ul_bps, sites, sim, tick);
  return out;
}

}  // namespace netsim::net
