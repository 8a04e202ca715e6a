// SPDX-License-Identifier: Apache-2.0
#include "netsim/behavior/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "netsim/error.hpp"

namespace netsim::behavior {

namespace {

constexpr double kTimeEps = 1e-9;

double speed(const MobilityFix& a, const MobilityFix& b) {
  double d = distance(a.position, b.position);
  double dt = b.timestamp_s - a.timestamp_s;
  if (dt <= 0.0) return d > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return d / dt;
}

}  // namespace

std::vector<MobilityFix> clean_track(std::vector<MobilityFix> fixes, const GeoGrid& grid,
                                     const PreprocessConfig& config) {
  std::stable_sort(fixes.begin(), fixes.end(),
                   [](const MobilityFix& a, const MobilityFix& b) { return a.timestamp_s < b.timestamp_s; });
  // Repeated timestamps keep their first fix.
  fixes.erase(std::unique(fixes.begin(), fixes.end(),
                          [](const MobilityFix& a, const MobilityFix& b) { return a.timestamp_s == b.timestamp_s; }),
              fixes.end());

  // A fix that is too fast to reach is dropped unless the following fix
  // confirms the new position (a relocation across a data gap).
  std::vector<MobilityFix> kept;
  for (std::size_t i = 0; i < fixes.size(); ++i) {
    if (kept.empty() || speed(kept.back(), fixes[i]) <= config.max_speed_mps) {
      kept.push_back(fixes[i]);
      continue;
    }
    if (i + 1 < fixes.size() && speed(fixes[i], fixes[i + 1]) <= config.max_speed_mps &&
        speed(kept.back(), fixes[i + 1]) > config.max_speed_mps) {
      kept.push_back(fixes[i]);
    }
  }

  std::vector<MobilityFix> filled;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    filled.push_back(kept[i]);
    if (i + 1 == kept.size()) break;
    const auto& a = kept[i];
    const auto& b = kept[i + 1];
    double gap = b.timestamp_s - a.timestamp_s;
    if (gap <= config.fill_step_s || gap >= config.max_gap_s) continue;
    for (int k = 1;; ++k) {
      double t = a.timestamp_s + k * config.fill_step_s;
      if (t >= b.timestamp_s - kTimeEps) break;
      double f = (t - a.timestamp_s) / gap;
      MobilityFix m;
      m.user_id = a.user_id;
      m.timestamp_s = t;
      m.position = {a.position.x + f * (b.position.x - a.position.x), a.position.y + f * (b.position.y - a.position.y)};
      if (a.altitude_m && b.altitude_m) m.altitude_m = *a.altitude_m + f * (*b.altitude_m - *a.altitude_m);
      filled.push_back(m);
    }
  }
  for (auto& f : filled) f.position = grid.clamp(f.position);
  return filled;
}

std::vector<TrajectorySequence> preprocess(const std::vector<MobilityFix>& fixes, const GeoGrid& grid,
                                           const PreprocessConfig& config) {
  if (fixes.empty()) fail(ErrorCode::EmptyInput, "no mobility fixes to preprocess");
  std::map<UserId, std::vector<MobilityFix>> by_user;
  for (const auto& f : fixes) by_user[f.user_id].push_back(f);

  std::vector<TrajectorySequence> out;
  for (auto& [user, track] : by_user) {
    auto clean = clean_track(std::move(track), grid, config);
    TrajectorySequence seq{user, {}};
    std::size_t i = 0;
    while (i < clean.size()) {
      CellToken token = grid.cell_index(clean[i].position);
      std::size_t j = i + 1;
      while (j < clean.size() && grid.cell_index(clean[j].position) == token) ++j;
      TrajectoryStep step;
      step.location = token;
      step.arrival_s = clean[i].timestamp_s;
      step.arrival_bucket = hour_bucket(step.arrival_s);
      step.stay_s = j < clean.size() ? clean[j].timestamp_s - step.arrival_s : clean[j - 1].timestamp_s - step.arrival_s;
      if (step.stay_s <= 0.0) step.stay_s = config.terminal_stay_s;
      seq.steps.push_back(step);
      i = j;
    }
    out.push_back(std::move(seq));
  }
  return out;
}

std::vector<TrajectorySequence> split_by_day(const std::vector<TrajectorySequence>& sequences) {
  std::vector<TrajectorySequence> out;
  for (const auto& seq : sequences) {
    long long day = std::numeric_limits<long long>::min();
    for (const auto& step : seq.steps) {
      double start = step.arrival_s;
      double end = step.arrival_s + step.stay_s;
      while (true) {
        auto d = static_cast<long long>(std::floor(start / 86400.0));
        if (d != day) {
          out.push_back({seq.user_id, {}});
          day = d;
        }
        double midnight = static_cast<double>(d + 1) * 86400.0;
        double piece_end = std::min(end, midnight);
        out.back().steps.push_back({step.location, hour_bucket(start), piece_end - start, start});
        if (end <= midnight) break;
        start = midnight;
      }
    }
  }
  return out;
}

std::vector<MobilityFix> expand_to_fixes(const std::vector<TrajectorySequence>& sequences, const GeoGrid& grid,
                                         double step_s) {
  std::vector<MobilityFix> out;
  for (const auto& seq : sequences) {
    for (std::size_t i = 0; i < seq.steps.size(); ++i) {
      const auto& s = seq.steps[i];
      Point c = grid.cell_center(s.location);
      double end = s.arrival_s + s.stay_s;
      for (int k = 0;; ++k) {
        double t = s.arrival_s + k * step_s;
        if (k > 0 && t >= end - kTimeEps) break;
        out.push_back({seq.user_id, t, c, std::nullopt});
      }
      if (i + 1 == seq.steps.size()) out.push_back({seq.user_id, end, c, std::nullopt});
    }
  }
  return out;
}

}  // namespace netsim::behavior
