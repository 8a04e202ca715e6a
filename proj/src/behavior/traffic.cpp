// SPDX-License-Identifier: Apache-2.0
#include "netsim/behavior/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include <fmt/core.h>
#include <json.hpp>

#include "netsim/error.hpp"
#include "netsim/random.hpp"

namespace netsim::behavior {

namespace {

constexpr double kMinIatS = 1e-6;
constexpr double kMinRateBps = 1000.0;
constexpr double kMinDurationS = 1.0;
constexpr std::size_t kSilhouetteSample = 3000;

double sq_dist(const Feature& a, const Feature& b) {
  double dx = a[0] - b[0];
  double dy = a[1] - b[1];
  return dx * dx + dy * dy;
}

std::size_t nearest(const std::vector<Feature>& centers, const Feature& p) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centers.size(); ++c) {
    double d = sq_dist(centers[c], p);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

KMeansResult lloyd(std::span<const Feature> points, std::size_t k, Rng& rng, std::size_t max_iterations) {
  std::size_t n = points.size();
  std::vector<Feature> centers{points[rng.index(n)]};
  std::vector<double> d2(n);
  while (centers.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = sq_dist(points[i], centers[nearest(centers, points[i])]);
      total += d2[i];
    }
    centers.push_back(total > 0.0 ? points[rng.categorical(d2)] : points[rng.index(n)]);
  }

  std::vector<std::size_t> assignment(n, 0);
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    bool changed = iter == 0;
    for (std::size_t i = 0; i < n; ++i) {
      auto c = nearest(centers, points[i]);
      if (c != assignment[i]) changed = true;
      assignment[i] = c;
    }
    std::vector<Feature> sums(k, Feature{0.0, 0.0});
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums[assignment[i]][0] += points[i][0];
      sums[assignment[i]][1] += points[i][1];
      ++counts[assignment[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        centers[c] = {sums[c][0] / counts[c], sums[c][1] / counts[c]};
        continue;
      }
      // Empty cluster: restart it at the worst-served point.
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        double d = sq_dist(points[i], centers[assignment[i]]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      centers[c] = points[far];
    }
    if (!changed) break;
  }
  KMeansResult r;
  for (std::size_t i = 0; i < n; ++i) {
    assignment[i] = nearest(centers, points[i]);
    r.inertia += sq_dist(points[i], centers[assignment[i]]);
  }
  r.centers = std::move(centers);
  r.assignment = std::move(assignment);
  return r;
}

}  // namespace

KMeansResult kmeans(std::span<const Feature> points, std::size_t k, std::uint64_t seed, std::size_t restarts,
                    std::size_t max_iterations) {
  if (k == 0) fail(ErrorCode::InvalidArgument, "k must be positive");
  if (points.size() < k) fail(ErrorCode::TooFewPoints, fmt::format("{} points for k = {}", points.size(), k));
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  Rng rng(seed);
  for (std::size_t r = 0; r < std::max<std::size_t>(1, restarts); ++r) {
    auto candidate = lloyd(points, k, rng, max_iterations);
    if (candidate.inertia < best.inertia) best = std::move(candidate);
  }
  best.silhouette = silhouette_score(points, best.assignment, k);
  return best;
}

double silhouette_score(std::span<const Feature> points, std::span<const std::size_t> assignment, std::size_t k) {
  std::size_t n = points.size();
  if (assignment.size() != n) fail(ErrorCode::ShapeMismatch, "assignment length differs from point count");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (n > kSilhouetteSample) {
    // Evenly strided subsample keeps the cost bounded.
    std::vector<std::size_t> sub;
    for (std::size_t i = 0; i < kSilhouetteSample; ++i) sub.push_back(i * n / kSilhouetteSample);
    idx = std::move(sub);
  }
  std::vector<std::size_t> sizes(k, 0);
  for (auto i : idx) ++sizes[assignment[i]];
  if (std::count_if(sizes.begin(), sizes.end(), [](std::size_t s) { return s > 0; }) < 2) return 0.0;

  double total = 0.0;
  std::vector<double> dist_sum(k);
  for (auto i : idx) {
    std::size_t own = assignment[i];
    if (sizes[own] < 2) continue;
    std::fill(dist_sum.begin(), dist_sum.end(), 0.0);
    for (auto j : idx) dist_sum[assignment[j]] += std::sqrt(sq_dist(points[i], points[j]));
    double a = dist_sum[own] / static_cast<double>(sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      if (c != own && sizes[c] > 0) b = std::min(b, dist_sum[c] / static_cast<double>(sizes[c]));
    }
    double m = std::max(a, b);
    if (m > 0.0) total += (b - a) / m;
  }
  return total / static_cast<double>(idx.size());
}

KMeansResult select_k_by_silhouette(std::span<const Feature> points, std::size_t k_min, std::size_t k_max,
                                    std::uint64_t seed) {
  if (k_min == 0 || k_max < k_min) fail(ErrorCode::InvalidArgument, fmt::format("k range [{}, {}]", k_min, k_max));
  if (points.size() < k_min) {
    fail(ErrorCode::TooFewPoints, fmt::format("{} points, fewer than k_min = {}", points.size(), k_min));
  }
  std::size_t n = points.size();
  Feature mean{0.0, 0.0};
  for (const auto& p : points) {
    mean[0] += p[0] / n;
    mean[1] += p[1] / n;
  }
  Feature sd{0.0, 0.0};
  for (const auto& p : points) {
    sd[0] += (p[0] - mean[0]) * (p[0] - mean[0]) / n;
    sd[1] += (p[1] - mean[1]) * (p[1] - mean[1]) / n;
  }
  for (auto& s : sd) s = s > 1e-24 ? std::sqrt(s) : 1.0;
  std::vector<Feature> scaled(n);
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = {(points[i][0] - mean[0]) / sd[0], (points[i][1] - mean[1]) / sd[1]};
  }

  KMeansResult best;
  bool have = false;
  for (std::size_t k = k_min; k <= std::min(k_max, n); ++k) {
    auto r = kmeans(scaled, k, hash_key({seed, k}));
    if (!have || r.silhouette > best.silhouette + 1e-12) {
      best = std::move(r);
      have = true;
    }
  }
  // Report centers as member means in the original feature space.
  std::size_t k = best.centers.size();
  std::vector<Feature> sums(k, Feature{0.0, 0.0});
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    sums[best.assignment[i]][0] += points[i][0];
    sums[best.assignment[i]][1] += points[i][1];
    ++counts[best.assignment[i]];
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] > 0) {
      best.centers[c] = {sums[c][0] / counts[c], sums[c][1] / counts[c]};
    } else {
      best.centers[c] = {best.centers[c][0] * sd[0] + mean[0], best.centers[c][1] * sd[1] + mean[1]};
    }
  }
  return best;
}

std::vector<PacketRecord> resolve_app_labels(std::vector<PacketRecord> packets) {
  std::vector<std::size_t> order(packets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (packets[a].user_id != packets[b].user_id) return packets[a].user_id < packets[b].user_id;
    return packets[a].timestamp_s < packets[b].timestamp_s;
  });
  std::map<UserId, int> last;
  for (auto i : order) {
    auto& p = packets[i];
    if (p.app_label) {
      last[p.user_id] = *p.app_label;
    } else {
      auto it = last.find(p.user_id);
      p.app_label = it == last.end() ? 0 : it->second;
    }
  }
  return packets;
}

std::vector<AppSession> extract_sessions(const std::vector<PacketRecord>& packets, double session_gap_s) {
  std::map<std::pair<UserId, int>, std::vector<const PacketRecord*>> groups;
  for (const auto& p : packets) {
    if (!p.app_label) fail(ErrorCode::InvalidArgument, "packet without app label; resolve labels first");
    groups[{p.user_id, *p.app_label}].push_back(&p);
  }
  std::vector<AppSession> sessions;
  for (auto& [key, list] : groups) {
    std::stable_sort(list.begin(), list.end(),
                     [](const PacketRecord* a, const PacketRecord* b) { return a->timestamp_s < b->timestamp_s; });
    std::size_t i = 0;
    while (i < list.size()) {
      std::size_t j = i + 1;
      while (j < list.size() && list[j]->timestamp_s - list[j - 1]->timestamp_s <= session_gap_s) ++j;
      if (j - i >= 2) {
        AppSession s;
        s.user_id = key.first;
        s.app = key.second;
        double len_sum = 0.0;
        double log_iat = 0.0;
        for (std::size_t m = i; m < j; ++m) {
          len_sum += list[m]->packet_len_bytes;
          (list[m]->direction == Direction::Downlink ? s.dl_bytes : s.ul_bytes) += list[m]->packet_len_bytes;
          if (m > i) log_iat += std::log(std::max(kMinIatS, list[m]->timestamp_s - list[m - 1]->timestamp_s));
        }
        s.feature = {len_sum / static_cast<double>(j - i), log_iat / static_cast<double>(j - i - 1)};
        s.duration_s = std::max(kMinDurationS, list[j - 1]->timestamp_s - list[i]->timestamp_s);
        sessions.push_back(s);
      }
      i = j;
    }
  }
  return sessions;
}

AppActionClusters cluster_app_actions(const std::vector<PacketRecord>& packets, std::size_t n_apps,
                                      const ClusterConfig& config, std::uint64_t seed) {
  if (n_apps == 0) fail(ErrorCode::InvalidArgument, "n_apps must be positive");
  auto labelled = resolve_app_labels(packets);
  for (const auto& p : labelled) {
    if (*p.app_label < 0 || static_cast<std::size_t>(*p.app_label) >= n_apps) {
      fail(ErrorCode::MismatchedApps, fmt::format("app label {} outside {} apps", *p.app_label, n_apps));
    }
  }
  auto sessions = extract_sessions(labelled, config.session_gap_s);

  AppActionClusters out;
  for (std::size_t app = 0; app < n_apps; ++app) {
    std::vector<const AppSession*> members;
    std::vector<Feature> points;
    for (const auto& s : sessions) {
      if (static_cast<std::size_t>(s.app) == app) {
        members.push_back(&s);
        points.push_back(s.feature);
      }
    }
    if (points.size() < config.k_min) {
      fail(ErrorCode::TooFewPoints,
           fmt::format("app {} has {} sessions, fewer than k_min = {}", app, points.size(), config.k_min));
    }
    auto km = select_k_by_silhouette(points, config.k_min, config.k_max, hash_key({seed, app}));
    std::size_t k = km.centers.size();
    AppClusters ac;
    ac.app_index = static_cast<int>(app);
    ac.silhouette = km.silhouette;
    ac.clusters.resize(k);

    auto rates = [](const std::vector<const AppSession*>& group, ActionCluster& c) {
      double dl = 0.0, ul = 0.0, dur = 0.0;
      for (const auto* s : group) {
        dl += 8.0 * s->dl_bytes / s->duration_s;
        ul += 8.0 * s->ul_bytes / s->duration_s;
        dur += s->duration_s;
      }
      auto n = static_cast<double>(group.size());
      c.dl_bps = std::max(kMinRateBps, dl / n);
      c.ul_bps = std::max(kMinRateBps, ul / n);
      c.mean_duration_s = std::max(kMinDurationS, dur / n);
    };
    ActionCluster app_mean;
    rates(members, app_mean);
    for (std::size_t c = 0; c < k; ++c) {
      std::vector<const AppSession*> group;
      for (std::size_t i = 0; i < members.size(); ++i) {
        if (km.assignment[i] == c) group.push_back(members[i]);
      }
      auto& cluster = ac.clusters[c];
      cluster.center = km.centers[c];
      cluster.weight = static_cast<double>(group.size()) / static_cast<double>(members.size());
      if (group.empty()) {
        cluster.dl_bps = app_mean.dl_bps;
        cluster.ul_bps = app_mean.ul_bps;
        cluster.mean_duration_s = app_mean.mean_duration_s;
      } else {
        rates(group, cluster);
      }
    }
    out.apps.push_back(std::move(ac));
  }
  return out;
}

std::vector<PreferenceVector> build_preference_vectors(const std::vector<PacketRecord>& packets, std::size_t n_apps) {
  if (packets.empty()) fail(ErrorCode::EmptyInput, "no packets to build preferences from");
  if (n_apps == 0) fail(ErrorCode::InvalidArgument, "n_apps must be positive");
  std::map<UserId, std::vector<double>> bytes;
  for (const auto& p : resolve_app_labels(packets)) {
    auto app = static_cast<std::size_t>(*p.app_label);
    if (*p.app_label < 0 || app >= n_apps) {
      fail(ErrorCode::MismatchedApps, fmt::format("app label {} outside {} apps", *p.app_label, n_apps));
    }
    auto& v = bytes[p.user_id];
    if (v.empty()) v.assign(n_apps, 0.0);
    v[app] += p.packet_len_bytes;
  }
  std::vector<PreferenceVector> out;
  for (auto& [user, v] : bytes) {
    double total = std::accumulate(v.begin(), v.end(), 0.0);
    for (double& x : v) x /= total;
    out.push_back({user, std::move(v)});
  }
  return out;
}

std::vector<ServiceSession> generate_traffic(const AppActionClusters& clusters,
                                             const std::vector<PreferenceVector>& prefs, double horizon_s,
                                             std::uint64_t seed, const TrafficGenConfig& config) {
  if (!(config.session_rate_per_s > 0.0) || config.log_sigma < 0.0) {
    fail(ErrorCode::InvalidArgument, "session rate must be positive and sigma non-negative");
  }
  for (const auto& app : clusters.apps) {
    if (app.clusters.empty()) fail(ErrorCode::InvalidArgument, fmt::format("app {} has no clusters", app.app_index));
  }
  for (const auto& p : prefs) {
    if (p.app_probs.size() != clusters.n_apps()) {
      fail(ErrorCode::MismatchedApps, fmt::format("user {} preference has {} apps, clusters have {}", p.user_id,
                                                  p.app_probs.size(), clusters.n_apps()));
    }
  }
  std::vector<ServiceSession> out;
  for (const auto& p : prefs) {
    Rng rng(hash_key({seed, p.user_id, 0x7472616666ULL}));
    double t = rng.exponential(config.session_rate_per_s);
    while (t < horizon_s) {
      auto app = rng.categorical(p.app_probs);
      const auto& ac = clusters.apps[app];
      std::vector<double> weights;
      for (const auto& c : ac.clusters) weights.push_back(c.weight);
      auto ci = rng.categorical(weights);
      const auto& c = ac.clusters[ci];
      ServiceSession s;
      s.user_id = p.user_id;
      s.app_index = static_cast<int>(app);
      s.action_cluster = static_cast<int>(ci);
      s.start_s = t;
      s.demand_bps = c.dl_bps * std::exp(config.log_sigma * rng.normal());
      s.demand_bps_ul = c.ul_bps * std::exp(config.log_sigma * rng.normal());
      s.duration_s = c.mean_duration_s * std::exp(config.log_sigma * rng.normal());
      out.push_back(s);
      t += rng.exponential(config.session_rate_per_s);
    }
  }
  return out;
}

std::string traffic_model_to_json(const TrafficModel& model) {
  nlohmann::json j;
  j["apps"] = nlohmann::json::array();
  for (const auto& app : model.clusters.apps) {
    nlohmann::json a{{"app", app.app_index}, {"silhouette", app.silhouette}, {"clusters", nlohmann::json::array()}};
    for (const auto& c : app.clusters) {
      a["clusters"].push_back({{"center", c.center},
                               {"weight", c.weight},
                               {"dl_bps", c.dl_bps},
                               {"ul_bps", c.ul_bps},
                               {"mean_duration_s", c.mean_duration_s}});
    }
    j["apps"].push_back(std::move(a));
  }
  j["preferences"] = nlohmann::json::array();
  for (const auto& p : model.preferences) j["preferences"].push_back({{"user_id", p.user_id}, {"app_probs", p.app_probs}});
  return j.dump(2);
}

TrafficModel traffic_model_from_json(const std::string& text) {
  TrafficModel model;
  try {
    auto j = nlohmann::json::parse(text);
    for (const auto& a : j.at("apps")) {
      AppClusters app;
      app.app_index = a.at("app").get<int>();
      app.silhouette = a.value("silhouette", 0.0);
      double total = 0.0;
      for (const auto& c : a.at("clusters")) {
        ActionCluster cl;
        cl.center = c.at("center").get<Feature>();
        cl.weight = c.at("weight").get<double>();
        cl.dl_bps = c.at("dl_bps").get<double>();
        cl.ul_bps = c.at("ul_bps").get<double>();
        cl.mean_duration_s = c.at("mean_duration_s").get<double>();
        if (cl.weight < 0.0 || !(cl.dl_bps > 0.0) || !(cl.ul_bps > 0.0) || !(cl.mean_duration_s > 0.0)) {
          fail(ErrorCode::SchemaMismatch, fmt::format("app {}: invalid cluster statistics", app.app_index));
        }
        total += cl.weight;
        app.clusters.push_back(cl);
      }
      if (app.clusters.empty() || std::abs(total - 1.0) > 1e-9) {
        fail(ErrorCode::SchemaMismatch, fmt::format("app {}: cluster weights must sum to 1", app.app_index));
      }
      if (app.app_index != static_cast<int>(model.clusters.apps.size())) {
        fail(ErrorCode::SchemaMismatch, "apps must be listed in index order");
      }
      model.clusters.apps.push_back(std::move(app));
    }
    if (j.contains("preferences")) {
      for (const auto& p : j.at("preferences")) {
        PreferenceVector pv{p.at("user_id").get<UserId>(), p.at("app_probs").get<std::vector<double>>()};
        double total = std::accumulate(pv.app_probs.begin(), pv.app_probs.end(), 0.0);
        if (pv.app_probs.size() != model.clusters.n_apps() || std::abs(total - 1.0) > 1e-9 ||
            std::any_of(pv.app_probs.begin(), pv.app_probs.end(), [](double x) { return x < 0.0; })) {
          fail(ErrorCode::SchemaMismatch, fmt::format("user {}: invalid preference vector", pv.user_id));
        }
        model.preferences.push_back(std::move(pv));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::SchemaMismatch, fmt::format("traffic model: {}", e.what()));
  }
  return model;
}

void save_traffic_model(const TrafficModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::Io, fmt::format("cannot write '{}'", path));
  out << traffic_model_to_json(model) << '\n';
}

TrafficModel load_traffic_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, fmt::format("cannot open '{}'", path));
  std::stringstream buf;
  buf << in.rdbuf();
  return traffic_model_from_json(buf.str());
}

}  // namespace netsim::behavior
