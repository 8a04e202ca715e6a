// SPDX-License-Identifier: Apache-2.0
#include "netsim/net/kpi.hpp"

#include <fmt/format.h>

#include "netsim/error.hpp"
#include "netsim/scenario/structured_text.hpp"

namespace netsim::net {

bool covered(const LinkState& link, const SimConstants& sim) {
  return link.attached && link.rsrp_dbm >= sim.coverage_rsrp_threshold_dbm && link.sinr_db >= sim.coverage_sinr_threshold_db;
}

namespace {

struct Accumulator {
  std::size_t users = 0, attached = 0, covered = 0;
  double rsrp = 0.0, sinr = 0.0, dl = 0.0, ul = 0.0;

  void add(const LinkState& link, double dl_bps, double ul_bps, const SimConstants& sim) {
    ++users;
    if (net::covered(link, sim)) ++covered;
    if (link.attached) {
      ++attached;
      rsrp += link.rsrp_dbm;
      sinr += link.sinr_db;
    }
    dl += dl_bps;
    ul += ul_bps;
  }

  KpiRow row(std::string scope) const {
    KpiRow r;
    r.scope = std::move(scope);
    if (users == 0) return r;
    double n = static_cast<double>(users);
    r.coverage_pct = 100.0 * static_cast<double>(covered) / n;
    if (attached > 0) {
      r.avg_rsrp_dbm = rsrp / static_cast<double>(attached);
      r.avg_sinr_db = sinr / static_cast<double>(attached);
    }
    r.dl_mbps = dl / n / 1e6;
    r.ul_mbps = ul / n / 1e6;
    r.users = attached;
    r.empty = false;
    return r;
  }
};

}  // namespace

KpiReport aggregate_kpis(std::span<const LinkState> links, std::span<const double> dl_bps,
                         std::span<const double> ul_bps, const std::vector<Site>& sites, const SimConstants& sim,
                         std::int64_t tick) {
  if (dl_bps.size() != links.size() || ul_bps.size() != links.size())
    fail(ErrorCode::ShapeMismatch, "rates do not match the link states");
  Accumulator grid;
  std::vector<Accumulator> cells(sites.size());
  for (std::size_t u = 0; u < links.size(); ++u) {
    grid.add(links[u], dl_bps[u], ul_bps[u], sim);
    for (std::size_t s = 0; links[u].attached && s < sites.size(); ++s) {
      if (sites[s].site_id == links[u].site_id) {
        cells[s].add(links[u], dl_bps[u], ul_bps[u], sim);
        break;
      }
    }
  }
  KpiReport report;
  report.tick = tick;
  report.grid = grid.row("grid");
  for (std::size_t s = 0; s < sites.size(); ++s) report.cells.push_back(cells[s].row(fmt::format("cell:{}", sites[s].site_id)));
  return report;
}

std::string kpi_row_csv(const std::string& tick, const KpiRow& row) {
  using config::format_number;
  return fmt::format("{},{},{},{},{},{},{},{}\n", tick, row.scope, format_number(row.coverage_pct),
                     format_number(row.avg_rsrp_dbm), format_number(row.avg_sinr_db), format_number(row.dl_mbps),
                     format_number(row.ul_mbps), row.users);
}

void write_kpi_rows(std::ostream& out, const KpiReport& report) {
  auto tick = std::to_string(report.tick);
  out << kpi_row_csv(tick, report.grid);
  for (const auto& cell : report.cells) out << kpi_row_csv(tick, cell);
}

}  // namespace netsim::net
