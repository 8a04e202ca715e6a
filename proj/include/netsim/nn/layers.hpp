// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "netsim/nn/graph.hpp"
#include "netsim/random.hpp"

namespace netsim::nn {

inline constexpr double kInitScale = 0.08;
inline constexpr double kLogSigmaMin = -8.0;
inline constexpr double kLogSigmaMax = 8.0;

Tensor uniform_init(std::vector<std::size_t> shape, Rng& rng, double scale = kInitScale);

// Affine -> tanh for every hidden layer, affine output layer.
struct Mlp {
  std::vector<std::size_t> dims;  // input, hidden..., output
  std::vector<std::size_t> weights;
  std::vector<std::size_t> biases;

  std::size_t input_dim() const { return dims.front(); }
  std::size_t output_dim() const { return dims.back(); }
};

Mlp make_mlp(ParamSet& params, const std::string& prefix, std::vector<std::size_t> dims, Rng& rng);
Var mlp_forward(Graph& g, const ParamSet& params, const Mlp& mlp, Var x);
// Same arithmetic without recording a graph.
std::vector<double> mlp_apply(const ParamSet& params, const Mlp& mlp, std::span<const double> x);

enum class CellKind { Gated };

// Single-layer gated recurrent cell with update and reset gates:
//   u = sigmoid(Wu x + Uu h + bu)
//   r = sigmoid(Wr x + Ur h + br)
//   c = tanh(Wc x + Uc (r * h) + bc)
//   h' = (1 - u) * h + u * c
struct RecurrentCell {
  CellKind kind = CellKind::Gated;
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  std::size_t wu = 0, uu = 0, bu = 0;
  std::size_t wr = 0, ur = 0, br = 0;
  std::size_t wc = 0, uc = 0, bc = 0;
};

RecurrentCell make_recurrent_cell(ParamSet& params, const std::string& prefix, std::size_t input_dim,
                                  std::size_t hidden_dim, Rng& rng);
Var recurrent_step(Graph& g, const ParamSet& params, const RecurrentCell& cell, Var x, Var h);
// Hidden state after every element, starting from h0 (zero vector if invalid).
std::vector<Var> recurrent_forward(Graph& g, const ParamSet& params, const RecurrentCell& cell,
                                   std::span<const Var> sequence, Var h0 = {});

struct GaussianParams {
  Var mu;
  Var log_sigma;  // already clamped to [kLogSigmaMin, kLogSigmaMax]
};

// Splits a [2 * latent] statistics vector into mean and clamped log-sigma.
GaussianParams gaussian_from_stats(Var stats, std::size_t latent_dim);
// z = mu + exp(log_sigma) * eps
Var reparameterize(const GaussianParams& q, const Tensor& eps);

struct ElboTerms {
  Var loss;
  double duration_nll = 0.0;
  double location_nll = 0.0;
  double kl = 0.0;
};

// Negative ELBO: summed reconstruction NLLs plus KL(q || N(0, I)).
ElboTerms elbo_loss(std::span<const Var> duration_nll, std::span<const Var> location_nll, const GaussianParams& q,
                    double kl_weight = 1.0);

// Positive rate link: softplus(x) + 1e-6.
Var positive_rate(Var x);
inline constexpr double kRateFloor = 1e-6;

}  // namespace netsim::nn
