// SPDX-License-Identifier: Apache-2.0
#include "netsim/rl/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "netsim/error.hpp"
#include "netsim/random.hpp"
#include "netsim/scenario/structured_text.hpp"

namespace netsim::rl {

namespace {

class Tracker {
 public:
  Tracker(const ConfigEvaluator& evaluator, std::size_t budget) : evaluator_(evaluator), budget_(budget) {
    result_.best_sites = evaluator.default_sites();
    result_.best_kpis = evaluator.baseline();
  }

  bool exhausted() const { return result_.progress.size() >= budget_; }

  Evaluation evaluate(const std::vector<Site>& sites) {
    auto e = evaluator_.evaluate(sites);
    result_.progress.push_back({result_.progress.size(), e.reward, e.kpis});
    if (!seen_ || e.reward > result_.best_reward) {
      seen_ = true;
      result_.best_reward = e.reward;
      result_.best_sites = e.sites;
      result_.best_kpis = e.kpis;
    }
    result_.best_trace.push_back(result_.best_reward);
    return e;
  }

  OptimizeResult& result() { return result_; }

 private:
  const ConfigEvaluator& evaluator_;
  std::size_t budget_;
  bool seen_ = false;
  OptimizeResult result_;
};

enum class Knob { Azimuth, Tilt, HWidth, VWidth, Active };

struct Move {
  std::size_t beam;
  Knob knob;
  int sign;
};

// The action for `move`, or nothing when the move would not change the beam.
std::optional<ActionSpec> move_action(const std::vector<Site>& sites, const Move& m) {
  auto action = noop_action(sites);
  auto& a = action[m.beam];
  switch (m.knob) {
    case Knob::Azimuth:
      a.azimuth_delta = kMaxDelta * m.sign;
      break;
    case Knob::Tilt:
      a.tilt_delta = m.sign;
      break;
    case Knob::HWidth:
      a.h_index += m.sign;
      if (a.h_index < 0 || a.h_index >= static_cast<int>(kHBeamwidthsDeg.size())) return std::nullopt;
      break;
    case Knob::VWidth:
      a.v_index += m.sign;
      if (a.v_index < 0 || a.v_index >= static_cast<int>(kVBeamwidthsDeg.size())) return std::nullopt;
      break;
    case Knob::Active:
      a.active = !a.active;
      break;
  }
  if (apply_action(sites, action).sites == sites) return std::nullopt;
  return action;
}

}  // namespace

OptimizeResult hill_climb(const ConfigEvaluator& evaluator, std::size_t budget, std::uint64_t seed) {
  if (budget == 0) fail(ErrorCode::InvalidArgument, "hill climbing needs a budget of at least one evaluation");
  Tracker tracker(evaluator, budget);
  std::vector<Move> moves;
  std::size_t n_beams = beam_count(evaluator.default_sites());
  for (std::size_t b = 0; b < n_beams; ++b) {
    for (int sign : {1, -1}) {
      moves.push_back({b, Knob::Azimuth, sign});
      moves.push_back({b, Knob::Tilt, sign});
      moves.push_back({b, Knob::HWidth, sign});
      moves.push_back({b, Knob::VWidth, sign});
    }
    moves.push_back({b, Knob::Active, 1});
  }
  Rng rng(hash_key({seed, 0x68696c6c}));
  for (std::size_t i = moves.size(); i > 1; --i) std::swap(moves[i - 1], moves[rng.index(i)]);

  std::vector<Site> current = evaluator.default_sites();
  double current_reward = 0.0;
  std::size_t cursor = 0, since_improvement = 0;
  while (!tracker.exhausted() && since_improvement < moves.size()) {
    const Move& m = moves[cursor];
    auto action = move_action(current, m);
    if (!action) {
      cursor = (cursor + 1) % moves.size();
      ++since_improvement;
      continue;
    }
    auto e = tracker.evaluate(apply_action(current, *action).sites);
    if (e.reward > current_reward) {
      current = e.sites;
      current_reward = e.reward;
      tracker.result().accepted.push_back(*action);
      since_improvement = 0;  // retry the same move next
    } else {
      cursor = (cursor + 1) % moves.size();
      ++since_improvement;
    }
  }
  return std::move(tracker.result());
}

namespace {

struct BeamDistribution {
  std::vector<double> h_probs, v_probs;
  double az_mean = 0.0, az_sigma = 0.0;
  double tilt_mean = 0.0, tilt_sigma = 0.0;
  double p_active = 0.9;
};

}  // namespace

OptimizeResult cross_entropy(const ConfigEvaluator& evaluator, const CemConfig& c) {
  if (c.population < 4) fail(ErrorCode::InvalidArgument, "cross-entropy population must be at least 4");
  if (!(c.elite_frac > 0.0 && c.elite_frac <= 0.5)) fail(ErrorCode::InvalidArgument, "elite fraction must be in (0, 0.5]");
  Rng rng(hash_key({c.seed, 0x63656d}));
  const auto& start = evaluator.default_sites();
  Tracker tracker(evaluator, c.population * (c.iters + 1));

  // Distributions start centred on the starting configuration.
  std::vector<BeamDistribution> dist;
  for (const auto& s : start) {
    for (const auto& b : s.beams) {
      BeamDistribution d;
      d.h_probs.assign(kHBeamwidthsDeg.size(), 0.5 / (kHBeamwidthsDeg.size() - 1));
      d.h_probs[static_cast<std::size_t>(h_beamwidth_index(b.h_beamwidth_deg))] = 0.5;
      d.v_probs.assign(kVBeamwidthsDeg.size(), 0.5 / (kVBeamwidthsDeg.size() - 1));
      d.v_probs[static_cast<std::size_t>(v_beamwidth_index(b.v_beamwidth_deg))] = 0.5;
      d.az_mean = b.azimuth_offset_deg;
      d.az_sigma = c.azimuth_sigma_deg;
      d.tilt_mean = b.tilt_deg;
      d.tilt_sigma = c.tilt_sigma_deg;
      d.p_active = b.active ? 0.9 : 0.1;
      dist.push_back(std::move(d));
    }
  }

  auto sample = [&] {
    auto sites = start;
    std::size_t k = 0;
    for (auto& s : sites) {
      for (auto& b : s.beams) {
        const auto& d = dist[k++];
        b.h_beamwidth_deg = kHBeamwidthsDeg[rng.categorical(d.h_probs)];
        b.v_beamwidth_deg = kVBeamwidthsDeg[rng.categorical(d.v_probs)];
        b.azimuth_offset_deg =
            std::clamp(std::round(d.az_mean + d.az_sigma * rng.normal()), kAzimuthOffsetMinDeg, kAzimuthOffsetMaxDeg);
        b.tilt_deg = std::clamp(std::round(d.tilt_mean + d.tilt_sigma * rng.normal()), kTiltMinDeg, kTiltMaxDeg);
        b.active = rng.uniform() < d.p_active;
      }
    }
    return sites;
  };

  auto n_elite = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(c.elite_frac * c.population)));
  for (std::size_t it = 0; it <= c.iters; ++it) {
    std::vector<Evaluation> pop;
    for (std::size_t i = 0; i < c.population; ++i) pop.push_back(tracker.evaluate(it == 0 && i == 0 ? start : sample()));
    if (it == c.iters) break;

    std::vector<std::size_t> order(pop.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return pop[a].reward > pop[b].reward; });
    order.resize(n_elite);
    bool degenerate = std::all_of(order.begin(), order.end(), [&](auto i) { return pop[i].reward == pop[order[0]].reward; });
    if (degenerate && n_elite > 1) continue;

    std::size_t k = 0;
    for (std::size_t s = 0; s < start.size(); ++s) {
      for (std::size_t b = 0; b < start[s].beams.size(); ++b, ++k) {
        auto& d = dist[k];
        std::vector<double> h(d.h_probs.size(), 0.0), v(d.v_probs.size(), 0.0);
        double az = 0.0, tilt = 0.0, active = 0.0;
        for (auto i : order) {
          const auto& beam = pop[i].sites[s].beams[b];
          h[static_cast<std::size_t>(h_beamwidth_index(beam.h_beamwidth_deg))] += 1.0 / n_elite;
          v[static_cast<std::size_t>(v_beamwidth_index(beam.v_beamwidth_deg))] += 1.0 / n_elite;
          az += beam.azimuth_offset_deg / n_elite;
          tilt += beam.tilt_deg / n_elite;
          active += (beam.active ? 1.0 : 0.0) / n_elite;
        }
        double az_var = 0.0, tilt_var = 0.0;
        for (auto i : order) {
          const auto& beam = pop[i].sites[s].beams[b];
          az_var += (beam.azimuth_offset_deg - az) * (beam.azimuth_offset_deg - az) / n_elite;
          tilt_var += (beam.tilt_deg - tilt) * (beam.tilt_deg - tilt) / n_elite;
        }
        double w = c.smoothing;
        for (std::size_t j = 0; j < h.size(); ++j) d.h_probs[j] = w * h[j] + (1.0 - w) * d.h_probs[j];
        for (std::size_t j = 0; j < v.size(); ++j) d.v_probs[j] = w * v[j] + (1.0 - w) * d.v_probs[j];
        d.az_mean = w * az + (1.0 - w) * d.az_mean;
        d.tilt_mean = w * tilt + (1.0 - w) * d.tilt_mean;
        d.az_sigma = std::max(c.min_sigma_deg, w * std::sqrt(az_var) + (1.0 - w) * d.az_sigma);
        d.tilt_sigma = std::max(c.min_sigma_deg, w * std::sqrt(tilt_var) + (1.0 - w) * d.tilt_sigma);
        d.p_active = std::clamp(w * active + (1.0 - w) * d.p_active, 0.02, 0.98);
      }
    }
  }
  return std::move(tracker.result());
}

std::string progress_csv(const OptimizeResult& r) {
  using config::format_number;
  std::string out = std::string(kProgressCsvHeader) + "\n";
  for (const auto& p : r.progress) {
    out += fmt::format("{},{},{},{},{},{},{}\n", p.eval_idx, format_number(p.reward), format_number(p.kpis.coverage_pct),
                       format_number(p.kpis.avg_rsrp_dbm), format_number(p.kpis.avg_sinr_db),
                       format_number(p.kpis.dl_mbps), format_number(p.kpis.ul_mbps));
  }
  return out;
}

}  // namespace netsim::rl
