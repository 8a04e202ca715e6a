// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "netsim/scenario/geo.hpp"

namespace netsim::channel {

// Zero-mean, unit-variance Gaussian field on a cols x rows lattice with
// correlation exp(-|dx| / D) * exp(-|dy| / D): seeded white noise passed
// through a normalised one-sided exponential filter along rows, then columns.
std::vector<double> correlated_unit_field(std::size_t cols, std::size_t rows, double spacing_m, double decorrelation_m,
                                          std::uint64_t seed);

// Per-site shadowing over the grid, frozen for an episode. The unit field is
// scaled by the line-of-sight or non-line-of-sight sigma of each link.
class ShadowField {
 public:
  ShadowField() = default;
  ShadowField(const GeoGrid& grid, int site_id, std::uint64_t seed, double sigma_los_db, double sigma_nlos_db,
              double decorrelation_m);

  double at(CellToken token, bool los) const;
  const std::vector<double>& unit() const { return unit_; }

 private:
  std::vector<double> unit_;
  double sigma_los_ = 0.0;
  double sigma_nlos_ = 0.0;
};

}  // namespace netsim::channel
