// SPDX-License-Identifier: Apache-2.0
//
// Black-box baselines over beam configurations: greedy coordinate search and
// the cross-entropy method. Both spend a fixed number of evaluations.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "netsim/rl/environment.hpp"

namespace netsim::rl {

struct ProgressRow {
  std::size_t eval_idx = 0;
  double reward = 0.0;
  KpiSummary kpis;
};

struct OptimizeResult {
  std::vector<Site> best_sites;
  double best_reward = 0.0;
  KpiSummary best_kpis;
  std::vector<ActionSpec> accepted;   // hill climbing: moves taken, in order
  std::vector<ProgressRow> progress;  // one row per evaluation
  std::vector<double> best_trace;     // best reward after each evaluation
};

// Single-beam, single-parameter moves from the current configuration in a
// seed-shuffled cyclic order; a strictly better move is taken and retried
// first. Stops at the budget or when a full cycle finds nothing better.
OptimizeResult hill_climb(const ConfigEvaluator& evaluator, std::size_t budget, std::uint64_t seed);

struct CemConfig {
  std::size_t population = 20;
  double elite_frac = 0.2;
  std::size_t iters = 9;  // refits after the initial population
  std::uint64_t seed = 1;
  double smoothing = 0.7;  // weight of the elite fit against the previous distribution
  double azimuth_sigma_deg = 30.0;
  double tilt_sigma_deg = 5.0;
  double min_sigma_deg = 1.0;
};

// Samples whole configurations from per-beam categorical (widths),
// Gaussian (azimuth, tilt) and Bernoulli (active) distributions. Slot 0 of
// the first population is the starting configuration. When every elite has
// the same reward the distribution is kept.
OptimizeResult cross_entropy(const ConfigEvaluator& evaluator, const CemConfig& config);

inline constexpr const char* kProgressCsvHeader = "eval_idx,reward,coverage_pct,avg_rsrp_dbm,avg_sinr_db,dl_mbps,ul_mbps";
std::string progress_csv(const OptimizeResult& result);

}  // namespace netsim::rl
