// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <string_view>

#include "netsim/nn/layers.hpp"
#include "netsim/scenario/scenario.hpp"

namespace netsim::channel {

// Log-distance models; distance is clamped to at least 1 m.
double path_loss_los_db(double distance_3d_m, double carrier_ghz);
// Never below the line-of-sight value at the same distance.
double path_loss_nlos_db(double distance_3d_m, double carrier_ghz);
double path_loss_db(double distance_3d_m, double carrier_ghz, bool los);

class PathLossProvider {
 public:
  virtual ~PathLossProvider() = default;
  virtual double loss_db(double distance_3d_m, double carrier_ghz, bool los) const = 0;
  virtual std::string_view name() const = 0;
};

class EmpiricalPathLoss final : public PathLossProvider {
 public:
  double loss_db(double distance_3d_m, double carrier_ghz, bool los) const override {
    return path_loss_db(distance_3d_m, carrier_ghz, los);
  }
  std::string_view name() const override { return "empirical"; }
};

struct LearnedPathLossConfig {
  std::size_t samples = 1024;
  std::size_t epochs = 150;
  std::size_t batch_size = 32;
  std::size_t hidden = 16;
  double learning_rate = 1e-2;
  double label_noise_db = 1.0;
  double min_distance_m = 1.0;
  double max_distance_m = 5000.0;
  double min_carrier_ghz = 0.7;
  double max_carrier_ghz = 6.0;
};

// MLP regressor of path loss on (log10 d, log10 fc, los), fitted to noisy
// samples of the empirical model.
class LearnedPathLoss final : public PathLossProvider {
 public:
  static LearnedPathLoss train(std::uint64_t seed, const LearnedPathLossConfig& config = {});

  double loss_db(double distance_3d_m, double carrier_ghz, bool los) const override;
  std::string_view name() const override { return "learned"; }
  const std::vector<double>& loss_trace() const { return loss_trace_; }

 private:
  nn::ParamSet params_;
  nn::Mlp mlp_;
  std::vector<double> loss_trace_;
};

// Learned providers are trained once per seed and shared.
std::shared_ptr<const PathLossProvider> make_path_loss(PathLossKind kind, std::uint64_t seed);

}  // namespace netsim::channel
