// SPDX-License-Identifier: Apache-2.0
//
// Simulated users for one episode: positions and service demand for every
// tick, generated up front from the scenario's user groups and traffic
// settings.
#pragma once

#include <cstdint>
#include <vector>

#include "netsim/behavior/types.hpp"
#include "netsim/net/emulator.hpp"
#include "netsim/scenario/scenario.hpp"

namespace netsim::orchestrator {

struct Population {
  std::vector<std::uint64_t> user_ids;
  std::vector<std::vector<Point>> positions;         // [tick][user]
  std::vector<std::vector<net::UserDemand>> demand;  // [tick][user]
  std::vector<behavior::ServiceSession> sessions;    // empty under full-buffer traffic

  std::size_t users() const { return user_ids.size(); }
};

// User ids are assigned from 1 in group order.
Population build_population(const Scenario& scenario, std::uint64_t seed, std::int64_t ticks);

// Poisson session arrivals with exponential durations and the configured
// demands, over [0, horizon_s).
std::vector<behavior::ServiceSession> poisson_sessions(const TrafficConfig& traffic,
                                                       const std::vector<std::uint64_t>& user_ids, double horizon_s,
                                                       std::uint64_t seed);

// Sessions drawn from a clustered traffic model file; the model's preference
// vectors are dealt to users round-robin.
std::vector<behavior::ServiceSession> cluster_sessions(const TrafficConfig& traffic,
                                                       const std::vector<std::uint64_t>& user_ids, double horizon_s,
                                                       std::uint64_t seed);

// Summed demand of each user's active sessions at time t_s.
std::vector<net::UserDemand> demand_at(const std::vector<behavior::ServiceSession>& sessions,
                                       const std::vector<std::uint64_t>& user_ids, double t_s);

}  // namespace netsim::orchestrator
