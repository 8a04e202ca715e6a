// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "netsim/behavior/types.hpp"
#include "netsim/scenario/geo.hpp"

namespace netsim::behavior {

struct PreprocessConfig {
  double max_speed_mps = 50.0;
  double max_gap_s = 600.0;       // gaps shorter than this are filled
  double fill_step_s = 60.0;
  double terminal_stay_s = 60.0;  // stay of a final step backed by a single fix
};

// One user's fixes after sorting, speed filtering, gap filling and clamping.
std::vector<MobilityFix> clean_track(std::vector<MobilityFix> fixes, const GeoGrid& grid,
                                     const PreprocessConfig& config = {});

// One sequence per user, ordered by user id.
std::vector<TrajectorySequence> preprocess(const std::vector<MobilityFix>& fixes, const GeoGrid& grid,
                                           const PreprocessConfig& config = {});

// One sequence per user-day. A stay that crosses midnight is cut there, so
// every day after the first starts at 00:00.
std::vector<TrajectorySequence> split_by_day(const std::vector<TrajectorySequence>& sequences);

// Cell-center fixes every `step_s` through each stay, ending at the final
// stay's end. preprocess() maps the result back to the same sequences.
std::vector<MobilityFix> expand_to_fixes(const std::vector<TrajectorySequence>& sequences, const GeoGrid& grid,
                                         double step_s = 60.0);

}  // namespace netsim::behavior
