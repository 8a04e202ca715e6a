// SPDX-License-Identifier: Apache-2.0
#include "netsim/rl/environment.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "netsim/error.hpp"

namespace netsim::rl {

RewardWeights normalize_weights(const RewardWeights& w) {
  double parts[] = {w.coverage, w.rsrp, w.sinr, w.dl, w.ul};
  double total = 0.0;
  for (double p : parts) {
    if (!(p >= 0.0) || !std::isfinite(p)) fail(ErrorCode::InvalidArgument, "reward weights must be finite and >= 0");
    total += p;
  }
  if (total <= 0.0) fail(ErrorCode::InvalidArgument, "at least one reward weight must be positive");
  return {w.coverage / total, w.rsrp / total, w.sinr / total, w.dl / total, w.ul / total};
}

double compute_reward(const KpiSummary& k, const KpiSummary& b, const RewardWeights& w, const RewardScales& s) {
  return w.coverage * (k.coverage_pct - b.coverage_pct) / s.coverage +
         w.rsrp * (k.avg_rsrp_dbm - b.avg_rsrp_dbm) / s.rsrp + w.sinr * (k.avg_sinr_db - b.avg_sinr_db) / s.sinr +
         w.dl * (k.dl_mbps - b.dl_mbps) / s.dl + w.ul * (k.ul_mbps - b.ul_mbps) / s.ul;
}

std::size_t beam_count(const std::vector<Site>& sites) {
  std::size_t n = 0;
  for (const auto& s : sites) n += s.beams.size();
  return n;
}

ActionSpec noop_action(const std::vector<Site>& sites) {
  ActionSpec a;
  for (const auto& s : sites)
    for (const auto& b : s.beams)
      a.push_back({h_beamwidth_index(b.h_beamwidth_deg), v_beamwidth_index(b.v_beamwidth_deg), 0, 0, b.active});
  return a;
}

AppliedAction apply_action(const std::vector<Site>& sites, const ActionSpec& action) {
  if (action.size() != beam_count(sites))
    fail(ErrorCode::InvalidArgument, fmt::format("action has {} beam entries, expected {}", action.size(), beam_count(sites)));
  AppliedAction out{sites, {}};
  std::size_t k = 0;
  for (auto& site : out.sites) {
    for (auto& beam : site.beams) {
      const auto& a = action[k++];
      if (a.h_index < 0 || a.h_index >= static_cast<int>(kHBeamwidthsDeg.size()) || a.v_index < 0 ||
          a.v_index >= static_cast<int>(kVBeamwidthsDeg.size()))
        fail(ErrorCode::InvalidArgument, fmt::format("beam {} of site {}: width index out of range", beam.beam_id, site.site_id));
      if (std::abs(a.azimuth_delta) > kMaxDelta || std::abs(a.tilt_delta) > kMaxDelta)
        fail(ErrorCode::InvalidArgument, fmt::format("beam {} of site {}: delta outside [-2, 2]", beam.beam_id, site.site_id));
      beam.h_beamwidth_deg = kHBeamwidthsDeg[static_cast<std::size_t>(a.h_index)];
      beam.v_beamwidth_deg = kVBeamwidthsDeg[static_cast<std::size_t>(a.v_index)];
      double az = beam.azimuth_offset_deg + a.azimuth_delta;
      double tilt = beam.tilt_deg + a.tilt_delta;
      beam.azimuth_offset_deg = std::clamp(az, kAzimuthOffsetMinDeg, kAzimuthOffsetMaxDeg);
      beam.tilt_deg = std::clamp(tilt, kTiltMinDeg, kTiltMaxDeg);
      beam.active = a.active;
      out.clamped.push_back(beam.azimuth_offset_deg != az || beam.tilt_deg != tilt);
    }
  }
  return out;
}

std::vector<orchestrator::BeamOverride> overrides_for(const std::vector<Site>& sites) {
  std::vector<orchestrator::BeamOverride> out;
  for (const auto& s : sites)
    for (const auto& b : s.beams) out.push_back({s.site_id, b});
  return out;
}

std::size_t state_length(std::size_t n_beams) { return 5 * n_beams + kDensityBins * kDensityBins + kKpiStateEntries; }

std::vector<double> user_density(const orchestrator::Population& pop, const GeoGrid& grid) {
  std::vector<double> hist(kDensityBins * kDensityBins, 0.0);
  double total = 0.0;
  auto bin = [](double v, double extent) {
    auto i = static_cast<std::size_t>(std::floor(v / extent * kDensityBins));
    return std::min(i, kDensityBins - 1);
  };
  for (const auto& tick : pop.positions) {
    for (const auto& p : tick) {
      auto c = bin(p.x - grid.origin().x, grid.width());
      auto r = bin(p.y - grid.origin().y, grid.height());
      hist[r * kDensityBins + c] += 1.0;
      total += 1.0;
    }
  }
  if (total > 0.0)
    for (auto& h : hist) h /= total;
  return hist;
}

namespace {

double unit(double v, double lo, double hi) { return std::clamp((v - lo) / (hi - lo), 0.0, 1.0); }

}  // namespace

std::vector<double> encode_state(const std::vector<Site>& sites, const std::vector<double>& density,
                                 const KpiSummary& k) {
  std::vector<double> s;
  s.reserve(state_length(beam_count(sites)));
  for (const auto& site : sites) {
    for (const auto& b : site.beams) {
      s.push_back(h_beamwidth_index(b.h_beamwidth_deg) / static_cast<double>(kHBeamwidthsDeg.size() - 1));
      s.push_back(v_beamwidth_index(b.v_beamwidth_deg) / static_cast<double>(kVBeamwidthsDeg.size() - 1));
      s.push_back(unit(b.azimuth_offset_deg, kAzimuthOffsetMinDeg, kAzimuthOffsetMaxDeg));
      s.push_back(unit(b.tilt_deg, kTiltMinDeg, kTiltMaxDeg));
      s.push_back(b.active ? 1.0 : 0.0);
    }
  }
  s.insert(s.end(), density.begin(), density.end());
  s.push_back(unit(k.coverage_pct, 0.0, 100.0));
  s.push_back(unit(k.avg_rsrp_dbm, kStateRsrpMinDbm, kStateRsrpMaxDbm));
  s.push_back(unit(k.avg_sinr_db, kStateSinrMinDb, kStateSinrMaxDb));
  s.push_back(unit(k.dl_mbps, 0.0, kStateDlMaxMbps));
  s.push_back(unit(k.ul_mbps, 0.0, kStateUlMaxMbps));
  return s;
}

ConfigEvaluator::ConfigEvaluator(const Scenario& scenario, std::uint64_t seed, const RewardWeights& weights,
                                 std::int64_t window_ticks)
    : world_(std::make_shared<const orchestrator::EpisodeWorld>(scenario, seed, window_ticks, true)),
      weights_(weights) {
  baseline_ = orchestrator::run_episode(world_, {}).summary;
}

Evaluation ConfigEvaluator::evaluate(const std::vector<Site>& sites) const {
  Evaluation e;
  e.sites = sites;
  e.kpis = orchestrator::run_episode(world_, overrides_for(sites)).summary;
  e.reward = compute_reward(e.kpis, baseline_, weights_);
  return e;
}

Environment::Environment(std::shared_ptr<const Scenario> scenario, EnvConfig config)
    : scenario_(std::move(scenario)), config_(config) {
  if (!scenario_) fail(ErrorCode::MissingField, "environment needs a scenario");
  if (config_.window_ticks < 1) fail(ErrorCode::InvalidArgument, "evaluation window must be at least one tick");
}

const ConfigEvaluator& Environment::evaluator() const {
  if (!evaluator_) fail(ErrorCode::NotReset, "environment has not been reset");
  return *evaluator_;
}

std::vector<double> Environment::reset(std::uint64_t seed, std::optional<RewardWeights> weights) {
  RewardWeights w = weights ? *weights : scenario_->reward.value_or(RewardWeights{});
  evaluator_ = std::make_unique<ConfigEvaluator>(*scenario_, seed, normalize_weights(w), config_.window_ticks);
  density_ = user_density(evaluator_->world().population(), scenario_->grid);
  sites_ = scenario_->sites;
  steps_ = 0;
  state_ = encode_state(sites_, density_, evaluator_->baseline());
  return state_;
}

EnvTransition Environment::step(const ActionSpec& action) {
  if (!evaluator_) fail(ErrorCode::NotReset, "step before reset");
  if (done()) fail(ErrorCode::EpisodeDone, "episode is done; reset to continue");
  auto applied = apply_action(sites_, action);
  auto eval = evaluator_->evaluate(applied.sites);
  EnvTransition t;
  t.state = state_;
  t.action = action;
  t.reward = eval.reward;
  sites_ = std::move(applied.sites);
  state_ = encode_state(sites_, density_, eval.kpis);
  t.next_state = state_;
  ++steps_;
  t.done = done();
  t.info = {eval.kpis, std::move(applied.clamped)};
  return t;
}

}  // namespace netsim::rl
