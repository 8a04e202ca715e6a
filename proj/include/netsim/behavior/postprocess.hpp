// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "netsim/behavior/types.hpp"
#include "netsim/scenario/geo.hpp"

namespace netsim::behavior {

struct PostprocessConfig {
  double walk_speed_mps = 1.5;
  double road_snap_m = 30.0;
  double tick_s = 1.0;
};

// Turns sequences into per-user waypoint tracks sampled every tick. Each step
// holds its cell center for round(stay / tick) samples (at least one); the
// move to the next cell adds ceil(path / (speed * tick)) interior samples
// along the straight segment, or along the road network when both centers lie
// within road_snap_m of a road node. Positions within road_snap_m of a road
// node are snapped onto it. Tracks start at the first arrival time.
std::vector<std::vector<Waypoint>> postprocess_trajectories(const std::vector<TrajectorySequence>& sequences,
                                                            const GeoGrid& grid, const RoadGraph& roads,
                                                            const PostprocessConfig& config = {});

}  // namespace netsim::behavior
