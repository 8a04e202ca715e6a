// SPDX-License-Identifier: Apache-2.0
//
// Antenna optimization as an episodic environment. Every evaluation replays
// the same users and sessions (fixed by the reset seed) under a candidate
// beam configuration and rewards the change in window-mean KPIs against the
// default configuration.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "netsim/orchestrator/episode.hpp"

namespace netsim::rl {

using orchestrator::KpiSummary;

// One delta unit per metric: coverage 1 pct-pt, RSRP 1 dB, SINR 1 dB,
// rates 10 Mbps.
struct RewardScales {
  double coverage = 1.0;
  double rsrp = 1.0;
  double sinr = 1.0;
  double dl = 10.0;
  double ul = 10.0;
};

// Scales to unit sum; InvalidArgument on negative weights or an all-zero set.
RewardWeights normalize_weights(const RewardWeights& w);
double compute_reward(const KpiSummary& kpis, const KpiSummary& baseline, const RewardWeights& w,
                      const RewardScales& scales = {});

inline constexpr int kMaxDelta = 2;

struct BeamAction {
  int h_index = 0;  // into kHBeamwidthsDeg
  int v_index = 0;  // into kVBeamwidthsDeg
  int azimuth_delta = 0;
  int tilt_delta = 0;
  bool active = true;

  friend bool operator==(const BeamAction&, const BeamAction&) = default;
};

// One entry per beam, in scenario order.
using ActionSpec = std::vector<BeamAction>;

std::size_t beam_count(const std::vector<Site>& sites);
ActionSpec noop_action(const std::vector<Site>& sites);

struct AppliedAction {
  std::vector<Site> sites;
  std::vector<bool> clamped;  // per beam: azimuth or tilt hit a bound
};

// Deltas saturate at the beam limits. InvalidArgument for a wrong beam
// count, an unknown width index or a delta outside [-2, 2].
AppliedAction apply_action(const std::vector<Site>& sites, const ActionSpec& action);

std::vector<orchestrator::BeamOverride> overrides_for(const std::vector<Site>& sites);

// State layout: 5 entries per beam (width indices, azimuth, tilt, active),
// an 8 x 8 user-density histogram, then coverage, RSRP, SINR, DL and UL.
inline constexpr std::size_t kDensityBins = 8;
inline constexpr std::size_t kKpiStateEntries = 5;
std::size_t state_length(std::size_t n_beams);

// Share of user-ticks per coarse cell, row-major from the grid origin.
std::vector<double> user_density(const orchestrator::Population& pop, const GeoGrid& grid);
std::vector<double> encode_state(const std::vector<Site>& sites, const std::vector<double>& density,
                                 const KpiSummary& kpis);

// Normalization ranges for the KPI part of the state.
inline constexpr double kStateRsrpMinDbm = -140.0, kStateRsrpMaxDbm = -40.0;
inline constexpr double kStateSinrMinDb = -10.0, kStateSinrMaxDb = 30.0;
inline constexpr double kStateDlMaxMbps = 100.0, kStateUlMaxMbps = 50.0;

struct Evaluation {
  std::vector<Site> sites;
  KpiSummary kpis;
  double reward = 0.0;
};

// Scores beam configurations on a fixed world against the default beams.
class ConfigEvaluator {
 public:
  ConfigEvaluator(const Scenario& scenario, std::uint64_t seed, const RewardWeights& weights,
                  std::int64_t window_ticks);

  const std::vector<Site>& default_sites() const { return world_->scenario().sites; }
  const KpiSummary& baseline() const { return baseline_; }
  const RewardWeights& weights() const { return weights_; }
  const orchestrator::EpisodeWorld& world() const { return *world_; }
  std::uint64_t seed() const { return world_->seed(); }
  std::int64_t window_ticks() const { return world_->ticks(); }

  Evaluation evaluate(const std::vector<Site>& sites) const;

 private:
  std::shared_ptr<const orchestrator::EpisodeWorld> world_;
  RewardWeights weights_;
  KpiSummary baseline_;
};

struct EnvConfig {
  std::int64_t window_ticks = 60;
  std::size_t max_steps = 60;
};

struct StepInfo {
  KpiSummary kpis;
  std::vector<bool> clamped;
};

struct EnvTransition {
  std::vector<double> state;
  ActionSpec action;
  double reward = 0.0;
  std::vector<double> next_state;
  bool done = false;
  StepInfo info;
};

class Environment {
 public:
  explicit Environment(std::shared_ptr<const Scenario> scenario, EnvConfig config = {});

  // Without weights the scenario's [reward] section is used, else coverage only.
  std::vector<double> reset(std::uint64_t seed, std::optional<RewardWeights> weights = std::nullopt);
  // Throws NotReset before the first reset and EpisodeDone after the last step.
  EnvTransition step(const ActionSpec& action);

  bool is_reset() const { return evaluator_ != nullptr; }
  bool done() const { return steps_ >= config_.max_steps; }
  std::size_t n_beams() const { return beam_count(scenario_->sites); }
  std::size_t state_size() const { return state_length(n_beams()); }
  const std::vector<Site>& sites() const { return sites_; }
  const std::vector<double>& state() const { return state_; }
  const ConfigEvaluator& evaluator() const;

 private:
  std::shared_ptr<const Scenario> scenario_;
  EnvConfig config_;
  std::unique_ptr<ConfigEvaluator> evaluator_;
  std::vector<double> density_;
  std::vector<Site> sites_;
  std::vector<double> state_;
  std::size_t steps_ = 0;
};

}  // namespace netsim::rl
