// SPDX-License-Identifier: Apache-2.0
#include "netsim/channel/large_scale.hpp"

#include <cmath>

#include <fmt/core.h>

#include "netsim/channel/fading.hpp"
#include "netsim/error.hpp"

namespace netsim::channel {

SiteLink site_link(const GeoGrid& grid, const Site& site, Point user, double ue_height_m, const ShadowField& shadow,
                   const PathLossProvider& path_loss) {
  if (!grid.contains(user)) {
    fail(ErrorCode::OutOfBounds, fmt::format("user at ({}, {}) outside the grid", user.x, user.y));
  }
  SiteLink link;
  link.antenna = {site.position.x, site.position.y, grid.terrain_at(site.position) + site.antenna_height_m};
  link.user = {user.x, user.y, grid.terrain_at(user) + ue_height_m};
  double horizontal = std::max(kMinLinkDistanceM, std::hypot(user.x - site.position.x, user.y - site.position.y));
  link.distance_3d_m = std::hypot(horizontal, link.user.z - link.antenna.z);
  link.los = los_check(grid, link.antenna, link.user);
  link.path_loss_db = path_loss.loss_db(link.distance_3d_m, site.carrier_ghz, link.los);
  link.shadow_db = shadow.at(grid.cell_index(user), link.los);
  return link;
}

LargeScale beam_link(const Site& site, const BeamConfig& beam, const SiteLink& link) {
  LargeScale ls;
  ls.los = link.los;
  ls.path_loss_db = link.path_loss_db;
  ls.shadow_db = link.shadow_db;
  ls.antenna_gain_dbi = antenna_gain_dbi(beam, relative_angles(site, beam, link.antenna, link.user));
  ls.coupling_loss_db = ls.path_loss_db + ls.shadow_db - ls.antenna_gain_dbi;
  return ls;
}

LargeScale large_scale(const GeoGrid& grid, const Site& site, const BeamConfig& beam, Point user, double ue_height_m,
                       const ShadowField& shadow, const PathLossProvider& path_loss) {
  return beam_link(site, beam, site_link(grid, site, user, ue_height_m, shadow, path_loss));
}

std::vector<BeamRef> beam_refs(const std::vector<Site>& sites) {
  std::vector<BeamRef> refs;
  for (std::size_t s = 0; s < sites.size(); ++s) {
    for (std::size_t b = 0; b < sites[s].beams.size(); ++b) refs.push_back({s, b, sites[s].site_id, sites[s].beams[b].beam_id});
  }
  return refs;
}

ChannelModel::ChannelModel(const Scenario& scenario, std::uint64_t seed)
    : grid_(scenario.grid), sim_(scenario.sim), seed_(seed), path_loss_(make_path_loss(scenario.sim.path_loss, seed)) {
  for (const auto& site : scenario.sites) {
    shadow_.emplace(site.site_id, ShadowField(grid_, site.site_id, seed, sim_.shadow_sigma_los_db,
                                              sim_.shadow_sigma_nlos_db, sim_.decorrelation_m));
  }
}

const ShadowField& ChannelModel::shadow(int site_id) const {
  auto it = shadow_.find(site_id);
  if (it == shadow_.end()) fail(ErrorCode::UnknownLink, fmt::format("no shadow field for site {}", site_id));
  return it->second;
}

std::vector<std::vector<SiteLink>> ChannelModel::site_links(const std::vector<Site>& sites,
                                                            const std::vector<ChannelUser>& users) const {
  std::vector<std::vector<SiteLink>> links(sites.size());
  for (std::size_t s = 0; s < sites.size(); ++s) {
    const auto& field = shadow(sites[s].site_id);
    links[s].reserve(users.size());
    for (const auto& u : users) {
      links[s].push_back(site_link(grid_, sites[s], u.position, sim_.ue_height_m, field, *path_loss_));
    }
  }
  return links;
}

ChannelMatrix ChannelModel::matrix(const std::vector<Site>& sites, const std::vector<ChannelUser>& users,
                                   std::int64_t tick) const {
  return matrix(sites, site_links(sites, users), users, tick);
}

ChannelMatrix ChannelModel::matrix(const std::vector<Site>& sites, const std::vector<std::vector<SiteLink>>& links,
                                   const std::vector<ChannelUser>& users, std::int64_t tick) const {
  if (links.size() != sites.size()) fail(ErrorCode::ShapeMismatch, "site links do not match the site list");
  ChannelMatrix m;
  m.beams = beam_refs(sites);
  m.users = users.size();
  m.h.resize(m.beams.size() * m.users);
  m.large.resize(m.beams.size() * m.users);
  for (std::size_t r = 0; r < m.beams.size(); ++r) {
    const auto& ref = m.beams[r];
    const auto& site = sites[ref.site_index];
    const auto& beam = site.beams[ref.beam_index];
    if (links[ref.site_index].size() != users.size()) fail(ErrorCode::ShapeMismatch, "site links do not match users");
    for (std::size_t u = 0; u < users.size(); ++u) {
      auto ls = beam_link(site, beam, links[ref.site_index][u]);
      auto fading = small_scale(site.site_id, beam.beam_id, users[u].id, tick, seed_, ls.los, sim_.rician_k_db);
      m.large[r * m.users + u] = ls;
      m.h[r * m.users + u] = std::pow(10.0, -ls.coupling_loss_db / 20.0) * fading;
    }
  }
  return m;
}

ChannelMatrix channel_matrix(const Scenario& scenario, const std::vector<ChannelUser>& users, std::int64_t tick,
                             std::uint64_t seed) {
  return ChannelModel(scenario, seed).matrix(scenario.sites, users, tick);
}

}  // namespace netsim::channel
