// SPDX-License-Identifier: Apache-2.0
#include "netsim/net/coverage_map.hpp"

#include <cmath>

#include <fmt/format.h>

#include "netsim/csv.hpp"
#include "netsim/net/link_budget.hpp"
#include "netsim/scenario/structured_text.hpp"

namespace netsim::net {

std::vector<CoverageCell> coverage_map(const channel::ChannelModel& model, const std::vector<Site>& sites,
                                       const SimConstants& sim) {
  const auto& grid = model.grid();
  auto refs = channel::beam_refs(sites);
  std::vector<bool> active(refs.size());
  for (std::size_t r = 0; r < refs.size(); ++r) active[r] = beam_active(sites, refs[r]);

  std::vector<CoverageCell> out;
  out.reserve(grid.cell_count());
  std::vector<double> rsrp(refs.size()), rx_mw(refs.size());
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    auto token = static_cast<CellToken>(c);
    Point p = grid.cell_center(token);
    for (std::size_t r = 0; r < refs.size(); ++r) {
      const Site& site = sites[refs[r].site_index];
      auto ls = channel::large_scale(grid, site, site.beams[refs[r].beam_index], p, sim.ue_height_m,
                                     model.shadow(site.site_id), model.path_loss());
      rsrp[r] = rsrp_dbm(site, ls.coupling_loss_db);
      rx_mw[r] = active[r] ? dbm_to_mw(rsrp[r]) : 0.0;
    }
    auto best = select_serving(rsrp, refs, active);
    double interference = 0.0;
    for (std::size_t r = 0; r < refs.size(); ++r)
      if (r != best) interference += rx_mw[r];
    double noise = dbm_to_mw(noise_per_re_dbm(sites[refs[best].site_index], sim.noise_figure_db));
    out.push_back({token, report_rsrp(rsrp[best]), sinr_db(rx_mw[best], interference, noise), refs[best].site_id,
                   refs[best].beam_id});
  }
  return out;
}

void write_coverage_csv(const std::string& path, const std::vector<CoverageCell>& cells) {
  using config::format_number;
  std::string text = std::string(kCoverageCsvHeader) + "\n";
  for (const auto& c : cells)
    text += fmt::format("{},{},{},{}:{}\n", c.cell, format_number(c.best_rsrp_dbm), format_number(c.best_sinr_db),
                        c.site_id, c.beam_id);
  csv::write_file(path, text);
}

}  // namespace netsim::net
