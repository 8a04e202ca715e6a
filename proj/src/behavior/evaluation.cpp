// SPDX-License-Identifier: Apache-2.0
#include "netsim/behavior/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/core.h>

#include "netsim/error.hpp"
#include "netsim/random.hpp"

namespace netsim::behavior {

namespace {

std::vector<double> smoothed(std::span<const double> counts, double smoothing) {
  double total = std::accumulate(counts.begin(), counts.end(), 0.0) + smoothing * static_cast<double>(counts.size());
  if (!(total > 0.0)) fail(ErrorCode::EmptyInput, "histogram has no mass");
  std::vector<double> p(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) p[i] = (counts[i] + smoothing) / total;
  return p;
}

double kl(const std::vector<double>& p, const std::vector<double>& q) {
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) d += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(0.0, d);
}

void check_pair(std::span<const double> p, std::span<const double> q, double smoothing) {
  if (p.size() != q.size() || p.empty()) fail(ErrorCode::ShapeMismatch, "histograms differ in length");
  if (smoothing < 0.0) fail(ErrorCode::InvalidArgument, "smoothing must be non-negative");
}

}  // namespace

double kl_divergence(std::span<const double> p_counts, std::span<const double> q_counts, double smoothing) {
  check_pair(p_counts, q_counts, smoothing);
  auto p = smoothed(p_counts, smoothing);
  auto q = smoothed(q_counts, smoothing);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0 && q[i] == 0.0) return std::numeric_limits<double>::infinity();
  }
  return kl(p, q);
}

double js_divergence(std::span<const double> p_counts, std::span<const double> q_counts, double smoothing) {
  check_pair(p_counts, q_counts, smoothing);
  auto p = smoothed(p_counts, smoothing);
  auto q = smoothed(q_counts, smoothing);
  std::vector<double> m(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) m[i] = 0.5 * (p[i] + q[i]);
  return std::min(std::log(2.0), 0.5 * kl(p, m) + 0.5 * kl(q, m));
}

std::vector<double> location_histogram(const std::vector<TrajectorySequence>& sequences, std::size_t cells) {
  std::vector<double> h(cells, 0.0);
  for (const auto& seq : sequences) {
    for (const auto& s : seq.steps) {
      if (s.location >= cells) fail(ErrorCode::OutOfBounds, fmt::format("location token {} outside the grid", s.location));
      h[s.location] += 1.0;
    }
  }
  return h;
}

std::vector<double> stay_histogram(const std::vector<TrajectorySequence>& sequences) {
  std::vector<double> h(kStayBinEdgesS.size() + 1, 0.0);
  for (const auto& seq : sequences) {
    for (const auto& s : seq.steps) {
      std::size_t bin = 0;
      while (bin < kStayBinEdgesS.size() && s.stay_s >= kStayBinEdgesS[bin]) ++bin;
      h[bin] += 1.0;
    }
  }
  return h;
}

GenerationReport evaluate_generation(const std::vector<TrajectorySequence>& real,
                                     const std::vector<TrajectorySequence>& generated, const GeoGrid& grid,
                                     double smoothing) {
  auto has_steps = [](const std::vector<TrajectorySequence>& v) {
    return std::any_of(v.begin(), v.end(), [](const auto& s) { return !s.steps.empty(); });
  };
  if (!has_steps(real) || !has_steps(generated)) fail(ErrorCode::EmptyInput, "evaluation needs steps on both sides");
  auto lr = location_histogram(real, grid.cell_count());
  auto lg = location_histogram(generated, grid.cell_count());
  auto sr = stay_histogram(real);
  auto sg = stay_histogram(generated);
  GenerationReport report;
  report.kl_location = kl_divergence(lr, lg, smoothing);
  report.kl_stay_duration = kl_divergence(sr, sg, smoothing);
  report.js_location = js_divergence(lr, lg, smoothing);
  return report;
}

std::vector<TrajectorySequence> random_walk_sequences(const GeoGrid& grid, std::size_t n_users, std::size_t steps,
                                                      double mean_stay_s, std::uint64_t seed) {
  if (!(mean_stay_s > 0.0)) fail(ErrorCode::InvalidArgument, "mean stay must be positive");
  Rng rng(seed);
  auto cols = static_cast<long long>(grid.cols());
  auto rows = static_cast<long long>(grid.rows());
  std::vector<TrajectorySequence> out;
  for (std::size_t u = 0; u < n_users; ++u) {
    TrajectorySequence seq{u, {}};
    auto cell = static_cast<long long>(rng.index(grid.cell_count()));
    double t = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
      double stay = rng.exponential(1.0 / mean_stay_s);
      seq.steps.push_back({static_cast<CellToken>(cell), hour_bucket(t), stay, t});
      t += stay;
      std::vector<long long> neighbours;
      long long r = cell / cols;
      long long c = cell % cols;
      for (long long dr = -1; dr <= 1; ++dr) {
        for (long long dc = -1; dc <= 1; ++dc) {
          if ((dr != 0 || dc != 0) && r + dr >= 0 && r + dr < rows && c + dc >= 0 && c + dc < cols) {
            neighbours.push_back((r + dr) * cols + c + dc);
          }
        }
      }
      if (!neighbours.empty()) cell = neighbours[rng.index(neighbours.size())];
    }
    out.push_back(std::move(seq));
  }
  return out;
}

}  // namespace netsim::behavior
