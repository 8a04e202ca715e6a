// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "netsim/behavior/types.hpp"
#include "netsim/scenario/geo.hpp"

namespace netsim::behavior {

// Stay bins: <1 min, 1-5, 5-15, 15-60, >60 min.
inline constexpr std::array<double, 4> kStayBinEdgesS = {60.0, 300.0, 900.0, 3600.0};

// Divergences between two count vectors of equal length, each smoothed as
// (c + smoothing) / (total + n * smoothing).
double kl_divergence(std::span<const double> p_counts, std::span<const double> q_counts, double smoothing);
double js_divergence(std::span<const double> p_counts, std::span<const double> q_counts, double smoothing);

std::vector<double> location_histogram(const std::vector<TrajectorySequence>& sequences, std::size_t cells);
std::vector<double> stay_histogram(const std::vector<TrajectorySequence>& sequences);

// KL(real || generated) over cell visits and stay bins, with add-one
// smoothing by default.
GenerationReport evaluate_generation(const std::vector<TrajectorySequence>& real,
                                     const std::vector<TrajectorySequence>& generated, const GeoGrid& grid,
                                     double smoothing = 1.0);

// Baseline: uniform start cell, then a uniformly chosen 8-neighbour each step,
// with exponential stays of the given mean.
std::vector<TrajectorySequence> random_walk_sequences(const GeoGrid& grid, std::size_t n_users, std::size_t steps,
                                                      double mean_stay_s, std::uint64_t seed);

}  // namespace netsim::behavior
