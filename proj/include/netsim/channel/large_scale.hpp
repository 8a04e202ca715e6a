// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "netsim/channel/antenna.hpp"
#include "netsim/channel/pathloss.hpp"
#include "netsim/channel/shadowing.hpp"
#include "netsim/scenario/scenario.hpp"

namespace netsim::channel {

struct LargeScale {
  double path_loss_db = 0.0;
  double shadow_db = 0.0;
  double antenna_gain_dbi = 0.0;
  double coupling_loss_db = 0.0;  // path loss + shadow - antenna gain
  bool los = false;

  friend bool operator==(const LargeScale&, const LargeScale&) = default;
};

// Beam-independent part of a site-to-user link.
struct SiteLink {
  Point3 antenna{};
  Point3 user{};
  double distance_3d_m = 0.0;
  bool los = false;
  double path_loss_db = 0.0;
  double shadow_db = 0.0;
};

SiteLink site_link(const GeoGrid& grid, const Site& site, Point user, double ue_height_m, const ShadowField& shadow,
                   const PathLossProvider& path_loss);
LargeScale beam_link(const Site& site, const BeamConfig& beam, const SiteLink& link);
LargeScale large_scale(const GeoGrid& grid, const Site& site, const BeamConfig& beam, Point user, double ue_height_m,
                       const ShadowField& shadow, const PathLossProvider& path_loss);

struct ChannelUser {
  std::uint64_t id = 0;
  Point position{};

  friend bool operator==(const ChannelUser&, const ChannelUser&) = default;
};

// A matrix row: one beam of one site, in scenario order.
struct BeamRef {
  std::size_t site_index = 0;
  std::size_t beam_index = 0;
  int site_id = 0;
  int beam_id = 0;

  friend bool operator==(const BeamRef&, const BeamRef&) = default;
};

std::vector<BeamRef> beam_refs(const std::vector<Site>& sites);

struct ChannelMatrix {
  std::vector<BeamRef> beams;
  std::size_t users = 0;
  std::vector<std::complex<double>> h;  // beams x users, row-major
  std::vector<LargeScale> large;        // beams x users, row-major

  std::size_t rows() const { return beams.size(); }
  const std::complex<double>& at(std::size_t row, std::size_t user) const { return h[row * users + user]; }
  const LargeScale& link(std::size_t row, std::size_t user) const { return large[row * users + user]; }

  friend bool operator==(const ChannelMatrix&, const ChannelMatrix&) = default;
};

// Frozen per-episode channel state: shadow fields per site and the path-loss
// provider. Beam settings are passed per call so they may change freely.
class ChannelModel {
 public:
  ChannelModel(const Scenario& scenario, std::uint64_t seed);

  const GeoGrid& grid() const { return grid_; }
  std::uint64_t seed() const { return seed_; }
  const ShadowField& shadow(int site_id) const;
  const PathLossProvider& path_loss() const { return *path_loss_; }

  // [site][user] beam-independent links.
  std::vector<std::vector<SiteLink>> site_links(const std::vector<Site>& sites,
                                                const std::vector<ChannelUser>& users) const;
  ChannelMatrix matrix(const std::vector<Site>& sites, const std::vector<ChannelUser>& users, std::int64_t tick) const;
  ChannelMatrix matrix(const std::vector<Site>& sites, const std::vector<std::vector<SiteLink>>& links,
                       const std::vector<ChannelUser>& users, std::int64_t tick) const;

 private:
  GeoGrid grid_;
  SimConstants sim_;
  std::uint64_t seed_ = 0;
  std::map<int, ShadowField> shadow_;
  std::shared_ptr<const PathLossProvider> path_loss_;
};

ChannelMatrix channel_matrix(const Scenario& scenario, const std::vector<ChannelUser>& users, std::int64_t tick,
                             std::uint64_t seed);

}  // namespace netsim::channel
