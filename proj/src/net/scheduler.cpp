// SPDX-License-Identifier: Apache-2.0
#include "netsim/net/scheduler.hpp"

#include <algorithm>
#include <cmath>

namespace netsim::net {

namespace {

// Keeps the proportional-fair metric finite for users never served.
constexpr double kMinAverageBps = 1.0;

}  // namespace

double spectral_efficiency(double sinr_db, double max_se) {
  return std::min(std::log2(1.0 + std::pow(10.0, sinr_db / 10.0)), max_se);
}

double rate_per_prb_bps(double sinr_db, const SimConstants& sim) {
  return kPrbBandwidthHz * spectral_efficiency(sinr_db, sim.max_se_bps_hz) * (1.0 - sim.overhead);
}

double user_throughput_bps(int prbs, double sinr_db, const SimConstants& sim, double demand_bps) {
  if (prbs <= 0) return 0.0;
  return std::min(prbs * rate_per_prb_bps(sinr_db, sim), demand_bps);
}

std::vector<int> schedule(std::span<const SchedUser> users, int n_prb, SchedulerKind kind, double alpha,
                          std::int64_t tick) {
  std::size_t n = users.size();
  std::vector<int> prbs(n, 0);
  if (n == 0) return prbs;
  auto wants = [&](std::size_t i) {
    const auto& u = users[i];
    return u.demand_bps > 0.0 && u.rate_per_prb_bps > 0.0 && prbs[i] * u.rate_per_prb_bps < u.demand_bps;
  };
  std::size_t cursor = static_cast<std::size_t>(tick < 0 ? 0 : tick) % n;
  for (int k = 0; k < n_prb; ++k) {
    std::size_t pick = n;
    if (kind == SchedulerKind::RoundRobin) {
      for (std::size_t step = 0; step < n; ++step) {
        std::size_t i = (cursor + step) % n;
        if (wants(i)) {
          pick = i;
          break;
        }
      }
      if (pick != n) cursor = (pick + 1) % n;
    } else {
      double best = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (!wants(i)) continue;
        double granted = prbs[i] * users[i].rate_per_prb_bps;
        double projected = std::max((1.0 - alpha) * users[i].average_bps + alpha * granted, kMinAverageBps);
        double metric = users[i].rate_per_prb_bps / projected;
        if (metric > best) {
          best = metric;
          pick = i;
        }
      }
    }
    if (pick == n) break;
    ++prbs[pick];
  }
  return prbs;
}

double smoothed_average(double previous_bps, double delivered_bps, double alpha) {
  return (1.0 - alpha) * previous_bps + alpha * delivered_bps;
}

}  // namespace netsim::net
