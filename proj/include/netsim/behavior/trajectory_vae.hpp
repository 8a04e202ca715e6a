// SPDX-License-Identifier: Apache-2.0
//
// Variational trajectory model. The encoder reads embedded (user, location,
// hour, stay) steps with a recurrent cell and maps the final state to a
// Gaussian latent. The decoder is a recurrent net initialised from z that
// emits, per step, location logits and an exponential stay-duration rate.
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "netsim/behavior/types.hpp"
#include "netsim/nn/layers.hpp"

namespace netsim::behavior {

struct VaeHyperParams {
  std::size_t latent_dim = 8;
  std::size_t hidden_dim = 32;
  std::size_t location_embed = 16;
  std::size_t time_embed = 4;
  std::size_t user_embed = 4;
  std::size_t user_buckets = 64;
  std::size_t max_steps = 32;       // longer sequences are truncated
  double duration_scale_s = 3600.0;  // stays are modelled in hours
  double learning_rate = 1e-3;
  std::size_t epochs = 10;
  std::size_t batch_size = 16;
  double kl_weight = 1.0;
  double grad_clip = 5.0;  // global gradient norm; 0 disables

  friend bool operator==(const VaeHyperParams&, const VaeHyperParams&) = default;
};

void validate_hyperparams(const VaeHyperParams& hp);

struct VaeLayout {
  std::size_t enc_location = 0, enc_hour = 0, enc_user = 0;
  std::size_t dec_location = 0, dec_hour = 0;
  nn::RecurrentCell encoder, decoder;
  nn::Mlp enc_head, dec_init, location_head, rate_head;
};

struct TrajectoryModel {
  VaeHyperParams hyper;
  std::size_t vocab = 0;
  std::uint64_t seed = 0;
  nn::ParamSet params;
  VaeLayout layout;

  friend bool operator==(const TrajectoryModel& a, const TrajectoryModel& b) {
    return a.hyper == b.hyper && a.vocab == b.vocab && a.seed == b.seed && a.params == b.params;
  }
};

// Fresh model with seeded uniform initialisation.
TrajectoryModel init_trajectory_model(const VaeHyperParams& hp, std::size_t vocab, std::uint64_t seed);

// Negative ELBO of one sequence for the given latent noise (size latent_dim).
// `params` must have the layout of `model`.
nn::ElboTerms sequence_loss(nn::Graph& g, const TrajectoryModel& model, const nn::ParamSet& params,
                            const TrajectorySequence& seq, const nn::Tensor& eps);

struct TrainResult {
  TrajectoryModel model;
  std::vector<double> loss_trace;  // mean per-sequence loss of each epoch
};

using EpochCallback = std::function<void(std::size_t epoch, double loss)>;

TrainResult train_trajectory_vae(const std::vector<TrajectorySequence>& sequences, std::size_t vocab,
                                 const VaeHyperParams& hp, std::uint64_t seed, const EpochCallback& on_epoch = {});

struct GenerationConfig {
  std::size_t n_users = 0;
  std::size_t steps = 10;
  std::uint64_t seed = 0;
  double time_of_day_start_h = 0.0;
  UserId first_user_id = 0;
};

std::vector<TrajectorySequence> generate_trajectories(const TrajectoryModel& model, const GenerationConfig& config);

// Versioned binary checkpoint: magic "NSIMTVAE", one version byte, then
// little-endian dims, seed and every named parameter tensor.
inline constexpr std::uint8_t kCheckpointVersion = 1;
std::string checkpoint_bytes(const TrajectoryModel& model);
TrajectoryModel model_from_checkpoint_bytes(const std::string& bytes);
void save_checkpoint(const TrajectoryModel& model, const std::string& path);
TrajectoryModel load_checkpoint(const std::string& path);

}  // namespace netsim::behavior
