// SPDX-License-Identifier: Apache-2.0
#include "netsim/net/link_budget.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include <fmt/format.h>

#include "netsim/error.hpp"

namespace netsim::net {

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

double re_power_dbm(const Site& site) { return site.tx_power_dbm - 10.0 * std::log10(12.0 * site.n_prb); }

double ue_re_power_dbm(const Site& site, double ue_tx_power_dbm) {
  return ue_tx_power_dbm - 10.0 * std::log10(12.0 * site.n_prb);
}

double noise_per_re_dbm(const Site& site, double noise_figure_db) {
  double re_hz = site.bandwidth_mhz * 1e6 / (12.0 * site.n_prb);
  return -174.0 + 10.0 * std::log10(re_hz) + noise_figure_db;
}

double rsrp_dbm(const Site& site, double coupling_loss_db) { return re_power_dbm(site) - coupling_loss_db; }

namespace {

void check_link(const ChannelMatrix& m, std::size_t row, std::size_t user) {
  if (row >= m.rows() || user >= m.users)
    fail(ErrorCode::UnknownLink, fmt::format("no link for beam row {} and user {}", row, user));
}

const Site& site_of(const ChannelMatrix& m, const std::vector<Site>& sites, std::size_t row) {
  auto index = m.beams[row].site_index;
  if (index >= sites.size()) fail(ErrorCode::UnknownLink, fmt::format("beam row {} refers to a missing site", row));
  return sites[index];
}

}  // namespace

double compute_rsrp(const ChannelMatrix& m, const std::vector<Site>& sites, std::size_t row, std::size_t user) {
  check_link(m, row, user);
  return rsrp_dbm(site_of(m, sites, row), m.link(row, user).coupling_loss_db);
}

double report_rsrp(double rsrp) { return std::clamp(rsrp, kRsrpReportMinDbm, kRsrpReportMaxDbm); }

bool beam_active(const std::vector<Site>& sites, const BeamRef& ref) {
  return ref.site_index < sites.size() && ref.beam_index < sites[ref.site_index].beams.size() &&
         sites[ref.site_index].beams[ref.beam_index].active;
}

std::size_t select_serving(std::span<const double> rsrp, std::span<const BeamRef> beams,
                           const std::vector<bool>& active) {
  if (rsrp.size() != beams.size() || active.size() != beams.size())
    fail(ErrorCode::ShapeMismatch, "serving selection inputs differ in length");
  std::size_t best = beams.size();
  for (std::size_t r = 0; r < beams.size(); ++r) {
    if (!active[r]) continue;
    if (best == beams.size() || rsrp[r] > rsrp[best] ||
        (rsrp[r] == rsrp[best] &&
         std::tie(beams[r].site_id, beams[r].beam_id) < std::tie(beams[best].site_id, beams[best].beam_id)))
      best = r;
  }
  if (best == beams.size()) fail(ErrorCode::NoActiveBeam, "no active beam to serve the user");
  return best;
}

double sinr_db(double signal_mw, double interference_mw, double noise_mw) {
  // Keeps a vanishing signal finite.
  signal_mw = std::max(signal_mw, std::numeric_limits<double>::min());
  return 10.0 * std::log10(signal_mw / (interference_mw + noise_mw));
}

double compute_sinr(const ChannelMatrix& m, const std::vector<Site>& sites, const SimConstants& sim, std::size_t user,
                    std::size_t serving_row) {
  check_link(m, serving_row, user);
  double signal = 0.0, interference = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (r != serving_row && !beam_active(sites, m.beams[r])) continue;
    double p = dbm_to_mw(re_power_dbm(site_of(m, sites, r))) * std::norm(m.at(r, user));
    if (r == serving_row)
      signal = p;
    else
      interference += p;
  }
  double noise = dbm_to_mw(noise_per_re_dbm(site_of(m, sites, serving_row), sim.noise_figure_db));
  return sinr_db(signal, interference, noise);
}

double compute_ul_sinr(const ChannelMatrix& m, const std::vector<Site>& sites, const SimConstants& sim,
                       std::size_t user, std::size_t serving_row) {
  check_link(m, serving_row, user);
  const Site& site = site_of(m, sites, serving_row);
  double signal = dbm_to_mw(ue_re_power_dbm(site, sim.ue_tx_power_dbm)) * std::norm(m.at(serving_row, user));
  return sinr_db(signal, 0.0, dbm_to_mw(noise_per_re_dbm(site, sim.noise_figure_db)));
}

std::vector<LinkState> link_states(const ChannelMatrix& m, const std::vector<Site>& sites, const SimConstants& sim,
                                   std::span<const std::uint64_t> user_ids) {
  if (user_ids.size() != m.users) fail(ErrorCode::ShapeMismatch, "user ids do not match the matrix columns");
  std::vector<bool> active(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) active[r] = beam_active(sites, m.beams[r]);
  bool any_active = std::find(active.begin(), active.end(), true) != active.end();

  std::vector<LinkState> out;
  out.reserve(m.users);
  std::vector<double> rsrp(m.rows());
  for (std::size_t u = 0; u < m.users; ++u) {
    if (!any_active) {
      LinkState s;
      s.user_id = user_ids[u];
      s.attached = false;
      s.sinr_db = s.ul_sinr_db = kUnattachedSinrDb;
      out.push_back(s);
      continue;
    }
    for (std::size_t r = 0; r < m.rows(); ++r) rsrp[r] = compute_rsrp(m, sites, r, u);
    std::size_t row = select_serving(rsrp, m.beams, active);
    LinkState s;
    s.user_id = user_ids[u];
    s.serving_row = row;
    s.site_id = m.beams[row].site_id;
    s.beam_id = m.beams[row].beam_id;
    s.rsrp_dbm = report_rsrp(rsrp[row]);
    s.sinr_db = compute_sinr(m, sites, sim, u, row);
    s.ul_sinr_db = compute_ul_sinr(m, sites, sim, u, row);
    out.push_back(s);
  }
  return out;
}

}  // namespace netsim::net
