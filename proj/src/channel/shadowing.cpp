// SPDX-License-Identifier: Apache-2.0
#include "netsim/channel/shadowing.hpp"

#include <cmath>

#include <fmt/core.h>

#include "netsim/error.hpp"
#include "netsim/random.hpp"

namespace netsim::channel {

std::vector<double> correlated_unit_field(std::size_t cols, std::size_t rows, double spacing_m, double decorrelation_m,
                                          std::uint64_t seed) {
  std::vector<double> f(cols * rows);
  Rng rng(seed);
  for (double& v : f) v = rng.normal();
  if (!(decorrelation_m > 0.0)) return f;
  double rho = std::exp(-spacing_m / decorrelation_m);
  double innov = std::sqrt(1.0 - rho * rho);
  // x[0] = w[0] and x[i] = rho x[i-1] + sqrt(1 - rho^2) w[i] keeps unit variance.
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 1; c < cols; ++c) f[r * cols + c] = rho * f[r * cols + c - 1] + innov * f[r * cols + c];
  }
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t r = 1; r < rows; ++r) f[r * cols + c] = rho * f[(r - 1) * cols + c] + innov * f[r * cols + c];
  }
  return f;
}

ShadowField::ShadowField(const GeoGrid& grid, int site_id, std::uint64_t seed, double sigma_los_db,
                         double sigma_nlos_db, double decorrelation_m)
    : sigma_los_(sigma_los_db), sigma_nlos_(sigma_nlos_db) {
  if (sigma_los_db < 0.0 || sigma_nlos_db < 0.0) fail(ErrorCode::OutOfRange, "shadow sigma must be non-negative");
  if (sigma_los_db > 0.0 || sigma_nlos_db > 0.0) {
    unit_ = correlated_unit_field(grid.cols(), grid.rows(), grid.resolution(), decorrelation_m,
                                  hash_key({seed, static_cast<std::uint64_t>(site_id), 0x736861646fULL}));
  }
}

double ShadowField::at(CellToken token, bool los) const {
  if (unit_.empty()) return 0.0;
  if (token >= unit_.size()) fail(ErrorCode::OutOfBounds, fmt::format("cell token {} outside shadow field", token));
  return unit_[token] * (los ? sigma_los_ : sigma_nlos_);
}

}  // namespace netsim::channel
