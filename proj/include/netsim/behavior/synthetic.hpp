// SPDX-License-Identifier: Apache-2.0
//
// Synthetic stand-ins for operator data: a two-mode commute corpus of
// MDT-like fixes and packet traces with a known action structure.
#pragma once

#include <cstdint>
#include <vector>

#include "netsim/behavior/traffic.hpp"
#include "netsim/behavior/types.hpp"
#include "netsim/scenario/geo.hpp"

namespace netsim::behavior {

struct CommuteCorpusConfig {
  std::size_t n_users = 200;
  std::size_t days = 30;
  double width_m = 2000.0;
  double height_m = 2000.0;
  double resolution_m = 200.0;
  Point residential{500.0, 500.0};
  Point business{1500.0, 1500.0};
  Point errands{1500.0, 500.0};
  double home_spread_m = 200.0;
  double work_spread_m = 120.0;
  double commuter_share = 0.7;  // the rest run midday errands from home
  double fix_interval_s = 300.0;
  double gps_noise_m = 1.0;
  double outlier_prob = 0.002;  // far-off fixes that the speed gate removes
};

GeoGrid commute_grid(const CommuteCorpusConfig& config);

// User ids start at 1; timestamps count seconds from midnight of day 0.
std::vector<MobilityFix> synthetic_commute_fixes(const CommuteCorpusConfig& config, std::uint64_t seed);

struct PacketCorpusConfig {
  std::size_t n_users = 40;
  std::size_t sessions_per_user = 30;
  bool drop_labels = false;
};

inline constexpr std::size_t kSyntheticApps = 3;
// Action categories of each synthetic app.
inline constexpr std::size_t kSyntheticActions[kSyntheticApps] = {2, 3, 2};

std::vector<PacketRecord> synthetic_packets(const PacketCorpusConfig& config, std::uint64_t seed);

// Gaussian blobs of `per_blob` points around each center.
std::vector<Feature> synthetic_blobs(const std::vector<Feature>& centers, double spread, std::size_t per_blob,
                                     std::uint64_t seed);

}  // namespace netsim::behavior
