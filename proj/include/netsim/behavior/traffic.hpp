// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "netsim/behavior/types.hpp"

namespace netsim::behavior {

using Feature = std::array<double, 2>;

struct KMeansResult {
  std::vector<Feature> centers;
  std::vector<std::size_t> assignment;
  double inertia = 0.0;
  double silhouette = 0.0;
};

// Lloyd iterations from k-means++ seeds, best of `restarts` by inertia.
// Ties in assignment go to the lower cluster index.
KMeansResult kmeans(std::span<const Feature> points, std::size_t k, std::uint64_t seed, std::size_t restarts = 4,
                    std::size_t max_iterations = 100);

// Mean silhouette; singletons and degenerate clusterings score 0.
double silhouette_score(std::span<const Feature> points, std::span<const std::size_t> assignment, std::size_t k);

// Best silhouette over k in [k_min, k_max]; ties keep the smaller k. Points
// are standardised per feature before clustering.
KMeansResult select_k_by_silhouette(std::span<const Feature> points, std::size_t k_min, std::size_t k_max,
                                    std::uint64_t seed);

struct ClusterConfig {
  std::size_t k_min = 2;
  std::size_t k_max = 8;
  double session_gap_s = 30.0;
};

struct AppSession {
  UserId user_id = 0;
  int app = 0;
  Feature feature{};  // mean packet length, mean log inter-arrival
  double dl_bytes = 0.0;
  double ul_bytes = 0.0;
  double duration_s = 0.0;
};

// Unlabelled packets take the label of the user's previous labelled packet,
// or app 0.
std::vector<PacketRecord> resolve_app_labels(std::vector<PacketRecord> packets);

// Sessions of one user and app split at inter-arrival gaps above the limit.
// Sessions of a single packet carry no inter-arrival feature and are dropped.
std::vector<AppSession> extract_sessions(const std::vector<PacketRecord>& packets, double session_gap_s);

AppActionClusters cluster_app_actions(const std::vector<PacketRecord>& packets, std::size_t n_apps,
                                      const ClusterConfig& config, std::uint64_t seed);

std::vector<PreferenceVector> build_preference_vectors(const std::vector<PacketRecord>& packets, std::size_t n_apps);

struct TrafficGenConfig {
  double session_rate_per_s = 1.0 / 300.0;
  double log_sigma = 0.25;
};

// Poisson session arrivals per user over [0, horizon_s).
std::vector<ServiceSession> generate_traffic(const AppActionClusters& clusters,
                                             const std::vector<PreferenceVector>& prefs, double horizon_s,
                                             std::uint64_t seed, const TrafficGenConfig& config = {});

struct TrafficModel {
  AppActionClusters clusters;
  std::vector<PreferenceVector> preferences;

  friend bool operator==(const TrafficModel&, const TrafficModel&) = default;
};

std::string traffic_model_to_json(const TrafficModel& model);
TrafficModel traffic_model_from_json(const std::string& text);
void save_traffic_model(const TrafficModel& model, const std::string& path);
TrafficModel load_traffic_model(const std::string& path);

}  // namespace netsim::behavior
