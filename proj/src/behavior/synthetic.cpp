// SPDX-License-Identifier: Apache-2.0
#include "netsim/behavior/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "netsim/random.hpp"

namespace netsim::behavior {

namespace {

constexpr double kDay = 86400.0;
constexpr double kHour = 3600.0;
constexpr double kOutlierJumpM = 20000.0;

// Stay at `from` until `start`, then move in a straight line to `to`.
struct Move {
  double start = 0.0;
  Point from{};
  Point to{};
  double speed = 1.0;

  double end() const { return start + distance(from, to) / speed; }
};

Point position_at(const std::vector<Move>& moves, Point home, double t) {
  Point at = home;
  for (const auto& m : moves) {
    if (t < m.start) return at;
    double e = m.end();
    if (t < e) {
      double f = (t - m.start) / (e - m.start);
      return {m.from.x + f * (m.to.x - m.from.x), m.from.y + f * (m.to.y - m.from.y)};
    }
    at = m.to;
  }
  return at;
}

Point scatter(Rng& rng, Point c, double spread) { return {c.x + spread * rng.normal(), c.y + spread * rng.normal()}; }

// Adds an out-and-back trip; the return leaves `stay_h` hours after arrival.
void trip(std::vector<Move>& moves, Point home, Point target, double leave_h, double stay_h, double speed) {
  double leave = std::clamp(leave_h, 0.5, 22.0) * kHour;
  if (!moves.empty()) leave = std::max(leave, moves.back().end() + 600.0);
  Move out{leave, home, target, speed};
  Move back{out.end() + std::max(0.25, stay_h) * kHour, target, home, speed};
  if (back.end() >= kDay - 60.0) return;
  moves.push_back(out);
  moves.push_back(back);
}

}  // namespace

GeoGrid commute_grid(const CommuteCorpusConfig& config) {
  return GeoGrid({0.0, 0.0}, config.width_m, config.height_m, config.resolution_m);
}

std::vector<MobilityFix> synthetic_commute_fixes(const CommuteCorpusConfig& config, std::uint64_t seed) {
  GeoGrid grid = commute_grid(config);
  std::vector<MobilityFix> fixes;
  for (std::size_t u = 0; u < config.n_users; ++u) {
    UserId user = u + 1;
    Rng rng(hash_key({seed, user, 0x636f6dULL}));
    bool commuter = rng.uniform() < config.commuter_share;
    Point home = grid.clamp(scatter(rng, config.residential, config.home_spread_m));
    Point work = grid.clamp(scatter(rng, config.business, config.work_spread_m));
    Point shop = grid.clamp(scatter(rng, config.errands, config.work_spread_m));
    double leave_mean = 7.5 + 0.5 * rng.normal();
    double phase = std::floor(rng.uniform() * config.fix_interval_s);
    for (std::size_t day = 0; day < config.days; ++day) {
      bool weekend = day % 7 >= 5;
      std::vector<Move> moves;
      if (commuter && !weekend) {
        double leave = leave_mean + 0.25 * rng.normal();
        trip(moves, home, work, leave, 9.0 + 0.5 * rng.normal(), 8.0);
      } else {
        trip(moves, home, shop, 10.5 + 1.0 * rng.normal(), 1.0 + 1.5 * rng.uniform(), 3.0);
        if (rng.uniform() < 0.4) trip(moves, home, shop, 16.0 + 1.0 * rng.normal(), 0.5 + rng.uniform(), 3.0);
      }
      for (double t = phase; t < kDay; t += config.fix_interval_s) {
        Point p = position_at(moves, home, t);
        p = {p.x + config.gps_noise_m * rng.normal(), p.y + config.gps_noise_m * rng.normal()};
        if (rng.uniform() < config.outlier_prob) {
          double a = 2.0 * std::numbers::pi * rng.uniform();
          p = {p.x + kOutlierJumpM * std::cos(a), p.y + kOutlierJumpM * std::sin(a)};
        }
        fixes.push_back({user, static_cast<double>(day) * kDay + t, p, 1.5});
      }
    }
  }
  return fixes;
}

std::vector<PacketRecord> synthetic_packets(const PacketCorpusConfig& config, std::uint64_t seed) {
  struct Action {
    double len;
    double iat_s;
    double dl_share;
  };
  // Lengths and inter-arrival times are spread widely enough that every
  // category forms its own cluster.
  static const std::vector<std::vector<Action>> kApps = {
      {{1400.0, 0.01, 0.95}, {600.0, 0.5, 0.7}},
      {{200.0, 0.05, 0.5}, {900.0, 0.2, 0.8}, {1200.0, 2.0, 0.6}},
      {{100.0, 1.0, 0.5}, {500.0, 0.02, 0.3}},
  };
  std::vector<PacketRecord> packets;
  for (std::size_t u = 0; u < config.n_users; ++u) {
    UserId user = u + 1;
    Rng rng(hash_key({seed, user, 0x706b74ULL}));
    std::vector<double> pref(kApps.size());
    for (auto& w : pref) w = rng.exponential(1.0);
    double t = 60.0 * rng.uniform();
    for (std::size_t s = 0; s < config.sessions_per_user; ++s) {
      auto app = rng.categorical(pref);
      const auto& action = kApps[app][rng.index(kApps[app].size())];
      auto n = 20 + rng.index(41);
      for (std::size_t k = 0; k < n; ++k) {
        PacketRecord p;
        p.user_id = user;
        p.timestamp_s = t;
        if (!config.drop_labels) p.app_label = static_cast<int>(app);
        double len = action.len * (1.0 + 0.05 * rng.normal());
        p.packet_len_bytes = static_cast<int>(std::clamp(std::round(len), 1.0, 65535.0));
        p.direction = rng.uniform() < action.dl_share ? Direction::Downlink : Direction::Uplink;
        packets.push_back(p);
        t += std::min(20.0, rng.exponential(1.0 / action.iat_s));
      }
      t += 120.0 + 300.0 * rng.uniform();
    }
  }
  return packets;
}

std::vector<Feature> synthetic_blobs(const std::vector<Feature>& centers, double spread, std::size_t per_blob,
                                     std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Feature> out;
  for (const auto& c : centers) {
    for (std::size_t i = 0; i < per_blob; ++i) out.push_back({c[0] + spread * rng.normal(), c[1] + spread * rng.normal()});
  }
  return out;
}

}  // namespace netsim::behavior
