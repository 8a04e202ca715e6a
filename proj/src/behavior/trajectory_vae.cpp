// SPDX-License-Identifier: Apache-2.0
#include "netsim/behavior/trajectory_vae.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <array>
#include <limits>

#include <fmt/core.h>

#include "netsim/error.hpp"
#include "netsim/nn/adam.hpp"
#include "netsim/random.hpp"

namespace netsim::behavior {

namespace {

using nn::Graph;
using nn::ParamSet;
using nn::Tensor;
using nn::Var;

constexpr std::size_t kHours = 24;

Var embed(Graph& g, const ParamSet& params, std::size_t table, std::size_t index) {
  return nn::row(g.param(params, table), index);
}

Var decoder_input(Graph& g, const TrajectoryModel& m, const ParamSet& params, std::size_t prev, int bucket) {
  std::array<Var, 2> parts{embed(g, params, m.layout.dec_location, prev),
                           embed(g, params, m.layout.dec_hour, static_cast<std::size_t>(bucket))};
  return nn::concat(parts);
}

Var decoder_rate(Graph& g, const TrajectoryModel& m, const ParamSet& params, Var h, std::size_t location) {
  std::array<Var, 2> parts{h, embed(g, params, m.layout.dec_location, location)};
  return nn::positive_rate(nn::mlp_forward(g, params, m.layout.rate_head, nn::concat(parts)));
}

Var decoder_start(Graph& g, const TrajectoryModel& m, const ParamSet& params, Var z) {
  return nn::tanh(nn::mlp_forward(g, params, m.layout.dec_init, z));
}

Tensor standard_normal(Rng& rng, std::size_t n) {
  Tensor t({n});
  for (std::size_t i = 0; i < n; ++i) t[i] = rng.normal();
  return t;
}

}  // namespace

void validate_hyperparams(const VaeHyperParams& hp) {
  auto require = [](bool ok, const char* what) {
    if (!ok) fail(ErrorCode::InvalidArgument, fmt::format("hyperparameter {} must be positive", what));
  };
  require(hp.latent_dim > 0, "latent_dim");
  require(hp.hidden_dim > 0, "hidden_dim");
  require(hp.location_embed > 0, "location_embed");
  require(hp.time_embed > 0, "time_embed");
  require(hp.user_embed > 0, "user_embed");
  require(hp.user_buckets > 0, "user_buckets");
  require(hp.max_steps > 0, "max_steps");
  require(hp.duration_scale_s > 0.0, "duration_scale_s");
  require(hp.learning_rate > 0.0 && std::isfinite(hp.learning_rate), "learning_rate");
  require(hp.epochs > 0, "epochs");
  require(hp.batch_size > 0, "batch_size");
  require(hp.kl_weight >= 0.0, "kl_weight");
  require(hp.grad_clip >= 0.0, "grad_clip");
}

TrajectoryModel init_trajectory_model(const VaeHyperParams& hp, std::size_t vocab, std::uint64_t seed) {
  validate_hyperparams(hp);
  if (vocab == 0) fail(ErrorCode::InvalidArgument, "vocabulary must not be empty");
  TrajectoryModel m;
  m.hyper = hp;
  m.vocab = vocab;
  m.seed = seed;
  Rng rng(seed);
  auto& p = m.params;
  auto& L = m.layout;
  L.enc_location = p.add("enc.location", nn::uniform_init({vocab, hp.location_embed}, rng));
  L.enc_hour = p.add("enc.hour", nn::uniform_init({kHours, hp.time_embed}, rng));
  L.enc_user = p.add("enc.user", nn::uniform_init({hp.user_buckets, hp.user_embed}, rng));
  L.encoder = nn::make_recurrent_cell(p, "enc.cell", hp.location_embed + hp.time_embed + hp.user_embed + 1,
                                      hp.hidden_dim, rng);
  L.enc_head = nn::make_mlp(p, "enc.head", {hp.hidden_dim, hp.hidden_dim, 2 * hp.latent_dim}, rng);
  L.dec_init = nn::make_mlp(p, "dec.init", {hp.latent_dim, hp.hidden_dim}, rng);
  L.dec_location = p.add("dec.location", nn::uniform_init({vocab + 1, hp.location_embed}, rng));
  L.dec_hour = p.add("dec.hour", nn::uniform_init({kHours, hp.time_embed}, rng));
  L.decoder = nn::make_recurrent_cell(p, "dec.cell", hp.location_embed + hp.time_embed, hp.hidden_dim, rng);
  L.location_head = nn::make_mlp(p, "dec.location_head", {hp.hidden_dim, vocab}, rng);
  L.rate_head = nn::make_mlp(p, "dec.rate_head", {hp.hidden_dim + hp.location_embed, 1}, rng);
  return m;
}

nn::ElboTerms sequence_loss(Graph& g, const TrajectoryModel& m, const ParamSet& params,
                            const TrajectorySequence& seq, const Tensor& eps) {
  const auto& hp = m.hyper;
  std::size_t n = std::min(seq.steps.size(), hp.max_steps);
  if (n == 0) fail(ErrorCode::EmptySequence, fmt::format("sequence of user {} has no steps", seq.user_id));
  for (std::size_t k = 0; k < n; ++k) {
    const auto& s = seq.steps[k];
    if (s.location >= m.vocab) {
      fail(ErrorCode::OutOfBounds, fmt::format("location token {} outside vocabulary {}", s.location, m.vocab));
    }
    if (s.arrival_bucket < 0 || s.arrival_bucket >= static_cast<int>(kHours)) {
      fail(ErrorCode::OutOfRange, fmt::format("arrival bucket {}", s.arrival_bucket));
    }
  }

  std::size_t user_bucket = static_cast<std::size_t>(seq.user_id % hp.user_buckets);
  std::vector<Var> inputs;
  inputs.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& s = seq.steps[k];
    std::array<Var, 4> parts{embed(g, params, m.layout.enc_location, s.location),
                             embed(g, params, m.layout.enc_hour, static_cast<std::size_t>(s.arrival_bucket)),
                             embed(g, params, m.layout.enc_user, user_bucket),
                             g.constant(Tensor::scalar(std::log1p(s.stay_s / hp.duration_scale_s)))};
    inputs.push_back(nn::concat(parts));
  }
  auto states = nn::recurrent_forward(g, params, m.layout.encoder, inputs);
  Var stats = nn::mlp_forward(g, params, m.layout.enc_head, states.back());
  auto q = nn::gaussian_from_stats(stats, hp.latent_dim);
  Var z = nn::reparameterize(q, eps);

  Var h = decoder_start(g, m, params, z);
  std::vector<Var> duration_nll;
  std::vector<Var> location_nll;
  std::size_t prev = m.vocab;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& s = seq.steps[k];
    h = nn::recurrent_step(g, params, m.layout.decoder, decoder_input(g, m, params, prev, s.arrival_bucket), h);
    location_nll.push_back(nn::categorical_nll(nn::mlp_forward(g, params, m.layout.location_head, h), s.location));
    duration_nll.push_back(nn::exponential_nll(decoder_rate(g, m, params, h, s.location), s.stay_s / hp.duration_scale_s));
    prev = s.location;
  }
  return nn::elbo_loss(duration_nll, location_nll, q, hp.kl_weight);
}

TrainResult train_trajectory_vae(const std::vector<TrajectorySequence>& sequences, std::size_t vocab,
                                 const VaeHyperParams& hp, std::uint64_t seed, const EpochCallback& on_epoch) {
  std::vector<const TrajectorySequence*> data;
  for (const auto& s : sequences) {
    if (!s.steps.empty()) data.push_back(&s);
  }
  if (data.size() < 2) {
    fail(ErrorCode::TooFewSequences, fmt::format("training needs at least 2 non-empty sequences, got {}", data.size()));
  }
  TrainResult result{init_trajectory_model(hp, vocab, seed), {}};
  auto& model = result.model;
  auto state = nn::AdamState::for_params(model.params);
  Rng rng(hash_key({seed, 0x747261696eULL}));
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += hp.batch_size) {
      std::size_t end = std::min(order.size(), start + hp.batch_size);
      Graph g;
      std::vector<Var> losses;
      try {
        for (std::size_t i = start; i < end; ++i) {
          auto terms = sequence_loss(g, model, model.params, *data[order[i]], standard_normal(rng, hp.latent_dim));
          total += terms.loss.value().item();
          losses.push_back(terms.loss);
        }
      } catch (const Error& e) {
        if (e.code() == ErrorCode::NonFinite) fail(ErrorCode::Diverged, fmt::format("epoch {}: {}", epoch, e.what()));
        throw;
      }
      Var loss = nn::scale(nn::sum(losses), 1.0 / static_cast<double>(end - start));
      g.backward(loss);
      auto grads = g.param_grads(model.params);
      double norm2 = 0.0;
      for (const auto& t : grads) {
        for (double v : t.data()) norm2 += v * v;
      }
      if (!std::isfinite(norm2)) fail(ErrorCode::Diverged, fmt::format("epoch {}: non-finite gradient", epoch));
      double norm = std::sqrt(norm2);
      if (hp.grad_clip > 0.0 && norm > hp.grad_clip) {
        double k = hp.grad_clip / norm;
        for (auto& t : grads) {
          for (double& v : t.data()) v *= k;
        }
      }
      nn::adam_step(model.params, grads, state, hp.learning_rate);
    }
    double mean = total / static_cast<double>(data.size());
    if (!std::isfinite(mean)) fail(ErrorCode::Diverged, fmt::format("epoch {}: loss {}", epoch, mean));
    result.loss_trace.push_back(mean);
    if (on_epoch) on_epoch(epoch, mean);
  }
  return result;
}

std::vector<TrajectorySequence> generate_trajectories(const TrajectoryModel& model, const GenerationConfig& config) {
  if (model.vocab == 0 || model.params.size() == 0) fail(ErrorCode::InvalidCheckpoint, "model has no parameters");
  std::vector<TrajectorySequence> out;
  out.reserve(config.n_users);
  const auto& hp = model.hyper;
  for (std::size_t u = 0; u < config.n_users; ++u) {
    Rng rng(hash_key({config.seed, u, 0x67656eULL}));
    TrajectorySequence seq{config.first_user_id + u, {}};
    Graph g;
    Var z = g.constant(standard_normal(rng, hp.latent_dim));
    Var h = decoder_start(g, model, model.params, z);
    double t = config.time_of_day_start_h * 3600.0;
    std::size_t prev = model.vocab;
    for (std::size_t k = 0; k < config.steps; ++k) {
      int bucket = hour_bucket(t);
      h = nn::recurrent_step(g, model.params, model.layout.decoder, decoder_input(g, model, model.params, prev, bucket), h);
      auto probs = nn::softmax(nn::mlp_forward(g, model.params, model.layout.location_head, h).value().data());
      std::size_t token = rng.categorical(probs);
      double rate = decoder_rate(g, model, model.params, h, token).value()[0];
      double stay = rng.exponential(rate) * hp.duration_scale_s;
      if (!(stay > 0.0)) stay = std::numeric_limits<double>::min();
      seq.steps.push_back({static_cast<CellToken>(token), bucket, stay, t});
      t += stay;
      prev = token;
    }
    out.push_back(std::move(seq));
  }
  return out;
}

}  // namespace netsim::behavior
