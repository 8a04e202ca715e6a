// SPDX-License-Identifier: Apache-2.0
#include "netsim/nn/layers.hpp"

#include <cmath>

#include <fmt/format.h>

#include "netsim/error.hpp"

namespace netsim::nn {

Tensor uniform_init(std::vector<std::size_t> shape, Rng& rng, double scale) {
  Tensor t(std::move(shape), 0.0);
  for (double& v : t.data()) v = rng.uniform(-scale, scale);
  return t;
}

Mlp make_mlp(ParamSet& params, const std::string& prefix, std::vector<std::size_t> dims, Rng& rng) {
  if (dims.size() < 2) fail(ErrorCode::InvalidArgument, "an MLP needs input and output dims");
  Mlp mlp;
  mlp.dims = std::move(dims);
  for (std::size_t l = 0; l + 1 < mlp.dims.size(); ++l) {
    mlp.weights.push_back(
        params.add(fmt::format("{}.w{}", prefix, l), uniform_init({mlp.dims[l + 1], mlp.dims[l]}, rng)));
    mlp.biases.push_back(params.add(fmt::format("{}.b{}", prefix, l), uniform_init({mlp.dims[l + 1]}, rng)));
  }
  return mlp;
}

Var mlp_forward(Graph& g, const ParamSet& params, const Mlp& mlp, Var x) {
  if (x.value().rank() != 1 || x.value().size() != mlp.input_dim()) {
    fail(ErrorCode::ShapeMismatch,
         fmt::format("mlp input {} expected [{}]", x.value().shape_str(), mlp.input_dim()));
  }
  Var h = x;
  for (std::size_t l = 0; l < mlp.weights.size(); ++l) {
    h = affine(g.param(params, mlp.weights[l]), h, g.param(params, mlp.biases[l]));
    if (l + 1 < mlp.weights.size()) h = tanh(h);
  }
  return h;
}

std::vector<double> mlp_apply(const ParamSet& params, const Mlp& mlp, std::span<const double> x) {
  if (x.size() != mlp.input_dim()) {
    fail(ErrorCode::ShapeMismatch, fmt::format("mlp input [{}] expected [{}]", x.size(), mlp.input_dim()));
  }
  std::vector<double> h(x.begin(), x.end());
  for (std::size_t l = 0; l < mlp.weights.size(); ++l) {
    const Tensor& w = params.value(mlp.weights[l]);
    const Tensor& b = params.value(mlp.biases[l]);
    std::vector<double> y(w.rows());
    for (std::size_t i = 0; i < w.rows(); ++i) {
      double acc = b[i];
      for (std::size_t j = 0; j < w.cols(); ++j) acc += w.at(i, j) * h[j];
      y[i] = l + 1 < mlp.weights.size() ? std::tanh(acc) : acc;
    }
    h = std::move(y);
  }
  return h;
}

RecurrentCell make_recurrent_cell(ParamSet& params, const std::string& prefix, std::size_t input_dim,
                                  std::size_t hidden_dim, Rng& rng) {
  RecurrentCell c;
  c.input_dim = input_dim;
  c.hidden_dim = hidden_dim;
  auto w = [&](const char* n) { return params.add(prefix + "." + n, uniform_init({hidden_dim, input_dim}, rng)); };
  auto u = [&](const char* n) { return params.add(prefix + "." + n, uniform_init({hidden_dim, hidden_dim}, rng)); };
  auto b = [&](const char* n) { return params.add(prefix + "." + n, uniform_init({hidden_dim}, rng)); };
  c.wu = w("wu");
  c.uu = u("uu");
  c.bu = b("bu");
  c.wr = w("wr");
  c.ur = u("ur");
  c.br = b("br");
  c.wc = w("wc");
  c.uc = u("uc");
  c.bc = b("bc");
  return c;
}

Var recurrent_step(Graph& g, const ParamSet& params, const RecurrentCell& cell, Var x, Var h) {
  if (x.value().rank() != 1 || x.value().size() != cell.input_dim) {
    fail(ErrorCode::ShapeMismatch,
         fmt::format("recurrent input {} expected [{}]", x.value().shape_str(), cell.input_dim));
  }
  auto p = [&](std::size_t i) { return g.param(params, i); };
  Var update = sigmoid(add(affine(p(cell.wu), x, p(cell.bu)), matvec(p(cell.uu), h)));
  Var reset = sigmoid(add(affine(p(cell.wr), x, p(cell.br)), matvec(p(cell.ur), h)));
  Var candidate = tanh(add(affine(p(cell.wc), x, p(cell.bc)), matvec(p(cell.uc), mul(reset, h))));
  return add(mul(one_minus(update), h), mul(update, candidate));
}

std::vector<Var> recurrent_forward(Graph& g, const ParamSet& params, const RecurrentCell& cell,
                                   std::span<const Var> sequence, Var h0) {
  if (sequence.empty()) fail(ErrorCode::EmptySequence, "recurrent_forward on an empty sequence");
  Var h = h0.valid() ? h0 : g.constant(Tensor({cell.hidden_dim}, 0.0));
  std::vector<Var> states;
  states.reserve(sequence.size());
  for (Var x : sequence) {
    h = recurrent_step(g, params, cell, x, h);
    states.push_back(h);
  }
  return states;
}

GaussianParams gaussian_from_stats(Var stats, std::size_t latent_dim) {
  if (stats.value().size() != 2 * latent_dim) {
    fail(ErrorCode::ShapeMismatch, fmt::format("gaussian stats {} for latent {}", stats.value().shape_str(), latent_dim));
  }
  return {slice(stats, 0, latent_dim), clamp(slice(stats, latent_dim, latent_dim), kLogSigmaMin, kLogSigmaMax)};
}

Var reparameterize(const GaussianParams& q, const Tensor& eps) {
  if (!q.mu.value().same_shape(eps) || !q.log_sigma.value().same_shape(eps)) {
    fail(ErrorCode::ShapeMismatch,
         fmt::format("reparameterize: mu {} log_sigma {} eps {}", q.mu.value().shape_str(),
                     q.log_sigma.value().shape_str(), eps.shape_str()));
  }
  Graph& g = q.mu.graph();
  return add(q.mu, mul(exp(q.log_sigma), g.constant(eps)));
}

ElboTerms elbo_loss(std::span<const Var> duration_nll, std::span<const Var> location_nll, const GaussianParams& q,
                    double kl_weight) {
  ElboTerms terms;
  std::vector<Var> parts;
  for (Var v : duration_nll) {
    terms.duration_nll += v.value().item();
    parts.push_back(v);
  }
  for (Var v : location_nll) {
    terms.location_nll += v.value().item();
    parts.push_back(v);
  }
  Var kl = kl_standard_normal(q.mu, q.log_sigma);
  terms.kl = kl.value().item();
  parts.push_back(kl_weight == 1.0 ? kl : scale(kl, kl_weight));
  if (!std::isfinite(terms.duration_nll) || !std::isfinite(terms.location_nll) || !std::isfinite(terms.kl)) {
    fail(ErrorCode::NonFinite, fmt::format("ELBO terms duration={} location={} kl={}", terms.duration_nll,
                                           terms.location_nll, terms.kl));
  }
  terms.loss = sum(parts);
  return terms;
}

Var positive_rate(Var x) { return add_scalar(softplus(x), kRateFloor); }

}  // namespace netsim::nn
