// SPDX-License-Identifier: Apache-2.0
#include "netsim/channel/pathloss.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>

#include "netsim/error.hpp"
#include "netsim/nn/adam.hpp"
#include "netsim/random.hpp"

namespace netsim::channel {

namespace {

constexpr double kLossCenterDb = 100.0;
constexpr double kLossScaleDb = 30.0;

std::array<double, 3> features(double d, double fc, bool los) {
  return {(std::log10(std::max(1.0, d)) - 1.5) / 1.5, (std::log10(fc) - 0.3) / 0.5, los ? 1.0 : -1.0};
}

}  // namespace

double path_loss_los_db(double distance_3d_m, double carrier_ghz) {
  double d = std::max(1.0, distance_3d_m);
  return 32.4 + 21.0 * std::log10(d) + 20.0 * std::log10(carrier_ghz);
}

double path_loss_nlos_db(double distance_3d_m, double carrier_ghz) {
  double d = std::max(1.0, distance_3d_m);
  double raw = 22.4 + 35.3 * std::log10(d) + 21.3 * std::log10(carrier_ghz);
  return std::max(raw, path_loss_los_db(d, carrier_ghz));
}

double path_loss_db(double distance_3d_m, double carrier_ghz, bool los) {
  return los ? path_loss_los_db(distance_3d_m, carrier_ghz) : path_loss_nlos_db(distance_3d_m, carrier_ghz);
}

LearnedPathLoss LearnedPathLoss::train(std::uint64_t seed, const LearnedPathLossConfig& config) {
  if (config.samples == 0 || config.epochs == 0 || config.batch_size == 0 || config.hidden == 0) {
    fail(ErrorCode::InvalidArgument, "learned path loss needs samples, epochs, batch size and hidden units");
  }
  Rng rng(seed);
  LearnedPathLoss model;
  model.mlp_ = nn::make_mlp(model.params_, "pathloss", {3, config.hidden, 1}, rng);

  struct Sample {
    std::array<double, 3> x;
    double y;
  };
  std::vector<Sample> data;
  double ld0 = std::log10(config.min_distance_m), ld1 = std::log10(config.max_distance_m);
  double lf0 = std::log10(config.min_carrier_ghz), lf1 = std::log10(config.max_carrier_ghz);
  for (std::size_t i = 0; i < config.samples; ++i) {
    double d = std::pow(10.0, rng.uniform(ld0, ld1));
    double fc = std::pow(10.0, rng.uniform(lf0, lf1));
    bool los = rng.uniform() < 0.5;
    double y = path_loss_db(d, fc, los) + config.label_noise_db * rng.normal();
    data.push_back({features(d, fc, los), (y - kLossCenterDb) / kLossScaleDb});
  }

  auto state = nn::AdamState::for_params(model.params_);
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      std::size_t end = std::min(order.size(), start + config.batch_size);
      nn::Graph g;
      std::vector<nn::Var> terms;
      for (std::size_t k = start; k < end; ++k) {
        const auto& s = data[order[k]];
        auto x = g.constant(nn::Tensor::vector({s.x[0], s.x[1], s.x[2]}));
        auto err = nn::add_scalar(nn::mlp_forward(g, model.params_, model.mlp_, x), -s.y);
        terms.push_back(nn::sum(nn::square(err)));
      }
      auto loss = nn::scale(nn::sum(terms), 1.0 / static_cast<double>(end - start));
      total += loss.value().item() * static_cast<double>(end - start);
      g.backward(loss);
      nn::adam_step(model.params_, g.param_grads(model.params_), state, config.learning_rate);
    }
    model.loss_trace_.push_back(total / static_cast<double>(data.size()));
  }
  return model;
}

double LearnedPathLoss::loss_db(double distance_3d_m, double carrier_ghz, bool los) const {
  auto x = features(distance_3d_m, carrier_ghz, los);
  double y = nn::mlp_apply(params_, mlp_, x)[0] * kLossScaleDb + kLossCenterDb;
  return std::max(1.0, y);
}

std::shared_ptr<const PathLossProvider> make_path_loss(PathLossKind kind, std::uint64_t seed) {
  if (kind == PathLossKind::Empirical) return std::make_shared<EmpiricalPathLoss>();
  static std::mutex mutex;
  static std::map<std::uint64_t, std::shared_ptr<const PathLossProvider>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[seed];
  if (!slot) slot = std::make_shared<LearnedPathLoss>(LearnedPathLoss::train(seed));
  return slot;
}

}  // namespace netsim::channel
