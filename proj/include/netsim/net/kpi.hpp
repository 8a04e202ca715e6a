// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "netsim/net/link_budget.hpp"

namespace netsim::net {

// Averages reported for a scope that has no users.
inline constexpr double kEmptyRsrpDbm = kRsrpReportMinDbm;
inline constexpr double kEmptySinrDb = kUnattachedSinrDb;

struct KpiRow {
  std::string scope;  // "grid" or "cell:<site_id>"
  double coverage_pct = 100.0;
  double avg_rsrp_dbm = kEmptyRsrpDbm;
  double avg_sinr_db = kEmptySinrDb;
  double dl_mbps = 0.0;
  double ul_mbps = 0.0;
  std::size_t users = 0;  // attached users
  bool empty = true;      // no users at all

  friend bool operator==(const KpiRow&, const KpiRow&) = default;
};

struct KpiReport {
  std::int64_t tick = 0;
  KpiRow grid;
  std::vector<KpiRow> cells;  // one per site, scenario order

  friend bool operator==(const KpiReport&, const KpiReport&) = default;
};

bool covered(const LinkState& link, const SimConstants& sim);

// Coverage is the share of users meeting both thresholds and rates are
// per-user means in Mbps, both over every user; RSRP and SINR are averaged in
// dB over attached users.
KpiReport aggregate_kpis(std::span<const LinkState> links, std::span<const double> dl_bps,
                         std::span<const double> ul_bps, const std::vector<Site>& sites, const SimConstants& sim,
                         std::int64_t tick);

inline constexpr const char* kKpiCsvHeader = "tick,scope,coverage_pct,avg_rsrp_dbm,avg_sinr_db,dl_mbps,ul_mbps,users";

// Writes the grid row followed by the cell rows.
void write_kpi_rows(std::ostream& out, const KpiReport& report);
std::string kpi_row_csv(const std::string& tick, const KpiRow& row);

}  // namespace netsim::net
