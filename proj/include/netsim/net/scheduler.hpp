// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "netsim/scenario/scenario.hpp"

namespace netsim::net {

inline constexpr double kPrbBandwidthHz = 180e3;

// Shannon spectral efficiency capped at `max_se`.
double spectral_efficiency(double sinr_db, double max_se);
double rate_per_prb_bps(double sinr_db, const SimConstants& sim);
// Rate carried by `prbs` resource blocks, capped at the session demand.
double user_throughput_bps(int prbs, double sinr_db, const SimConstants& sim, double demand_bps);

struct SchedUser {
  double rate_per_prb_bps = 0.0;
  double demand_bps = 0.0;  // 0 without an active session
  double average_bps = 0.0;  // smoothed delivered rate from earlier ticks
};

// Hands out PRBs one at a time. Proportional fair picks the largest
// instantaneous / average rate, with the average projected over what was
// already granted this tick; round robin cycles from an offset that rotates
// with the tick. A user stops competing once its demand is met.
std::vector<int> schedule(std::span<const SchedUser> users, int n_prb, SchedulerKind kind, double alpha,
                          std::int64_t tick);

double smoothed_average(double previous_bps, double delivered_bps, double alpha);

}  // namespace netsim::net
