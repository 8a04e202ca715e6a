// SPDX-License-Identifier: Apache-2.0
//
// Per-link radio measurements: reference-signal power, serving-beam choice
// and downlink/uplink SINR on the per-resource-element scale.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "netsim/channel/large_scale.hpp"

namespace netsim::net {

using channel::BeamRef;
using channel::ChannelMatrix;

inline constexpr double kRsrpReportMinDbm = -180.0;
inline constexpr double kRsrpReportMaxDbm = -20.0;

double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);

// Transmit power per resource element (dBm).
double re_power_dbm(const Site& site);
// User transmit power spread over the carrier's resource elements (dBm).
double ue_re_power_dbm(const Site& site, double ue_tx_power_dbm);
// Thermal noise in one resource element plus the receiver noise figure (dBm).
double noise_per_re_dbm(const Site& site, double noise_figure_db);

// Unclamped RSRP; an inactive beam's coupling loss drives it below -200 dBm.
double rsrp_dbm(const Site& site, double coupling_loss_db);
double compute_rsrp(const ChannelMatrix& m, const std::vector<Site>& sites, std::size_t row, std::size_t user);
double report_rsrp(double rsrp_dbm);

bool beam_active(const std::vector<Site>& sites, const BeamRef& ref);

// argmax RSRP over active beams; ties go to the lower (site_id, beam_id).
std::size_t select_serving(std::span<const double> rsrp_dbm, std::span<const BeamRef> beams,
                           const std::vector<bool>& active);

double sinr_db(double signal_mw, double interference_mw, double noise_mw);

// Full-buffer downlink SINR: every other active beam interferes at full power.
double compute_sinr(const ChannelMatrix& m, const std::vector<Site>& sites, const SimConstants& sim, std::size_t user,
                    std::size_t serving_row);
// Noise-limited uplink SINR at the serving beam.
double compute_ul_sinr(const ChannelMatrix& m, const std::vector<Site>& sites, const SimConstants& sim,
                       std::size_t user, std::size_t serving_row);

// Reported for a user no active beam can serve.
inline constexpr double kUnattachedSinrDb = -30.0;

struct LinkState {
  std::uint64_t user_id = 0;
  bool attached = true;
  std::size_t serving_row = 0;
  int site_id = 0;
  int beam_id = 0;
  double rsrp_dbm = kRsrpReportMinDbm;  // clamped to the reporting range
  double sinr_db = 0.0;
  double ul_sinr_db = 0.0;

  friend bool operator==(const LinkState&, const LinkState&) = default;
};

// One LinkState per matrix column; `user_ids` labels the columns. With every
// beam switched off the users are left unattached.
std::vector<LinkState> link_states(const ChannelMatrix& m, const std::vector<Site>& sites, const SimConstants& sim,
                                   std::span<const std::uint64_t> user_ids);

}  // namespace netsim::net
