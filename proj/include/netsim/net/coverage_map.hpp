// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "netsim/channel/large_scale.hpp"

namespace netsim::net {

// Best server per grid cell from large-scale coupling alone (no fading).
struct CoverageCell {
  CellToken cell = 0;
  double best_rsrp_dbm = 0.0;
  double best_sinr_db = 0.0;
  int site_id = 0;
  int beam_id = 0;
};

std::vector<CoverageCell> coverage_map(const channel::ChannelModel& model, const std::vector<Site>& sites,
                                       const SimConstants& sim);

inline constexpr const char* kCoverageCsvHeader = "cell_token,best_rsrp_dbm,best_sinr_db,serving_beam";

// serving_beam is written as <site_id>:<beam_id>.
void write_coverage_csv(const std::string& path, const std::vector<CoverageCell>& cells);

}  // namespace netsim::net
