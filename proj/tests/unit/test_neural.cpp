// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "netsim/error.hpp"
#include "netsim/nn/adam.hpp"
#include "netsim/nn/layers.hpp"

using namespace netsim;
using namespace netsim::nn;

namespace {

double sigmoid_ref(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Straight-line y = W x + b without the graph.
std::vector<double> affine_ref(const Tensor& w, const std::vector<double>& x, const Tensor& b) {
  std::vector<double> y(w.rows());
  for (std::size_t i = 0; i < w.rows(); ++i) {
    double acc = b[i];
    for (std::size_t j = 0; j < w.cols(); ++j) acc += w.at(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

Tensor random_vector(std::size_t n, Rng& rng, double scale = 1.0) {
  Tensor t({n});
  for (double& v : t.data()) v = rng.uniform(-scale, scale);
  return t;
}

}  // namespace

TEST_CASE("mlp_forward trivial cases") {
  Rng rng(1);
  ParamSet ps;
  Mlp mlp = make_mlp(ps, "m", {3, 4, 2}, rng);
  for (std::size_t i = 0; i < ps.size(); ++i) ps.value(i).fill(0.0);
  Graph g;
  Var y = mlp_forward(g, ps, mlp, g.constant(Tensor::vector({0.3, -2.0, 5.0})));
  CHECK(y.value() == Tensor::vector({0.0, 0.0}));

  ParamSet id;
  Mlp one = make_mlp(id, "id", {1, 1}, rng);
  id.value(one.weights[0]) = Tensor::matrix(1, 1, {1.0});
  id.value(one.biases[0]) = Tensor::vector({0.0});
  Graph g2;
  CHECK(mlp_forward(g2, id, one, g2.constant(Tensor::vector({0.5}))).value()[0] == 0.5);

  Graph g3;
  CHECK_THROWS_AS(mlp_forward(g3, ps, mlp, g3.constant(Tensor::vector({1.0}))), Error);
}

TEST_CASE("mlp_forward matches straight-line arithmetic") {
  Rng rng(2);
  ParamSet ps;
  Mlp mlp = make_mlp(ps, "m", {4, 5, 3, 2}, rng);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (double& v : ps.value(i).data()) v = rng.uniform(-1, 1);
  }
  std::vector<double> x{0.1, -0.7, 1.3, 0.25};
  std::vector<double> h = x;
  for (std::size_t l = 0; l < mlp.weights.size(); ++l) {
    h = affine_ref(ps.value(mlp.weights[l]), h, ps.value(mlp.biases[l]));
    if (l + 1 < mlp.weights.size()) {
      for (double& v : h) v = std::tanh(v);
    }
  }
  Graph g;
  Var y = mlp_forward(g, ps, mlp, g.constant(Tensor::vector(x)));
  for (std::size_t i = 0; i < h.size(); ++i) CHECK(std::fabs(y.value()[i] - h[i]) < 1e-12);
}

TEST_CASE("recurrent_forward frozen state and shape contract") {
  Rng rng(3);
  ParamSet ps;
  RecurrentCell cell = make_recurrent_cell(ps, "rnn", 2, 3, rng);
  for (std::size_t i = 0; i < ps.size(); ++i) ps.value(i).fill(0.0);
  ps.value(cell.bu).fill(-1000.0);  // update gate == 0
  Graph g;
  std::vector<Var> seq{g.constant(Tensor::vector({1, 2})), g.constant(Tensor::vector({-3, 0.5})),
                       g.constant(Tensor::vector({7, 7}))};
  auto hs = recurrent_forward(g, ps, cell, seq);
  REQUIRE(hs.size() == 3);
  for (Var h : hs) CHECK(h.value() == Tensor({3}, 0.0));

  std::vector<Var> one{seq[0]};
  CHECK(recurrent_forward(g, ps, cell, one).size() == 1);
  std::vector<Var> none;
  CHECK_THROWS_AS(recurrent_forward(g, ps, cell, none), Error);
  std::vector<Var> wrong{g.constant(Tensor::vector({1, 2, 3}))};
  CHECK_THROWS_AS(recurrent_forward(g, ps, cell, wrong), Error);
}

TEST_CASE("recurrent_forward matches a hand-unrolled evaluation") {
  Rng rng(4);
  ParamSet ps;
  RecurrentCell cell = make_recurrent_cell(ps, "rnn", 3, 4, rng);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (double& v : ps.value(i).data()) v = rng.uniform(-0.8, 0.8);
  }
  std::vector<std::vector<double>> xs{{0.5, -1.0, 0.2}, {1.5, 0.3, -0.4}, {-0.9, 0.0, 0.7}};
  std::vector<double> h(4, 0.0);
  std::vector<std::vector<double>> expected;
  auto matvec_ref = [](const Tensor& w, const std::vector<double>& v) {
    std::vector<double> out(w.rows(), 0.0);
    for (std::size_t i = 0; i < w.rows(); ++i) {
      for (std::size_t j = 0; j < w.cols(); ++j) out[i] += w.at(i, j) * v[j];
    }
    return out;
  };
  for (const auto& x : xs) {
    auto ux = affine_ref(ps.value(cell.wu), x, ps.value(cell.bu));
    auto uh = matvec_ref(ps.value(cell.uu), h);
    auto rx = affine_ref(ps.value(cell.wr), x, ps.value(cell.br));
    auto rh = matvec_ref(ps.value(cell.ur), h);
    std::vector<double> u(4), r(4), rhv(4);
    for (int i = 0; i < 4; ++i) {
      u[i] = sigmoid_ref(ux[i] + uh[i]);
      r[i] = sigmoid_ref(rx[i] + rh[i]);
      rhv[i] = r[i] * h[i];
    }
    auto cx = affine_ref(ps.value(cell.wc), x, ps.value(cell.bc));
    auto ch = matvec_ref(ps.value(cell.uc), rhv);
    std::vector<double> next(4);
    for (int i = 0; i < 4; ++i) next[i] = (1 - u[i]) * h[i] + u[i] * std::tanh(cx[i] + ch[i]);
    h = next;
    expected.push_back(h);
  }
  Graph g;
  std::vector<Var> seq;
  for (const auto& x : xs) seq.push_back(g.constant(Tensor::vector(x)));
  auto hs = recurrent_forward(g, ps, cell, seq);
  for (std::size_t t = 0; t < 3; ++t) {
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::fabs(hs[t].value()[i] - expected[t][i]) < 1e-12);
  }
}

TEST_CASE("reparameterize") {
  Graph g;
  auto z = [&](double mu, double ls, double eps) {
    GaussianParams q{g.constant(Tensor::vector({mu})), g.constant(Tensor::vector({ls}))};
    return reparameterize(q, Tensor::vector({eps})).value()[0];
  };
  CHECK(z(0.0, 0.0, 0.5) == 0.5);
  CHECK(z(1.25, 0.3, 0.0) == 1.25);
  CHECK(z(1.0, std::log(2.0), -1.0) == doctest::Approx(-1.0).epsilon(1e-15));
  GaussianParams q{g.constant(Tensor::vector({0, 0})), g.constant(Tensor::vector({0, 0}))};
  CHECK_THROWS_AS(reparameterize(q, Tensor::vector({1.0})), Error);

  // log-sigma is clamped before use.
  Var stats = g.constant(Tensor::vector({0.0, 50.0}));
  GaussianParams clamped = gaussian_from_stats(stats, 1);
  CHECK(clamped.log_sigma.value()[0] == kLogSigmaMax);
}

TEST_CASE("elbo_loss terms") {
  Graph g;
  GaussianParams prior{g.constant(Tensor::vector({0, 0, 0})), g.constant(Tensor::vector({0, 0, 0}))};
  std::vector<Var> none;
  CHECK(elbo_loss(none, none, prior).kl == 0.0);

  Var rate = g.constant(Tensor::scalar(1.0));
  CHECK(exponential_nll(rate, 1.0).value().item() == 1.0);

  Var logits = g.constant(Tensor::vector({0.3, 0.3, 0.3, 0.3}));
  CHECK(categorical_nll(logits, 2).value().item() == doctest::Approx(std::log(4.0)).epsilon(1e-15));
  CHECK(std::log(4.0) == doctest::Approx(1.3863).epsilon(1e-4));

  std::vector<Var> dur{exponential_nll(g.constant(Tensor::scalar(2.0)), 0.5)};
  std::vector<Var> loc{categorical_nll(logits, 0)};
  GaussianParams q{g.constant(Tensor::vector({1.0})), g.constant(Tensor::vector({0.0}))};
  ElboTerms t = elbo_loss(dur, loc, q);
  CHECK(t.duration_nll == doctest::Approx(1.0 - std::log(2.0)));
  CHECK(t.kl == doctest::Approx(0.5));
  CHECK(t.loss.value().item() == doctest::Approx(t.duration_nll + t.location_nll + t.kl));

  std::vector<Var> bad{g.constant(Tensor::scalar(std::nan("")))};
  CHECK_THROWS_AS(elbo_loss(bad, none, q), Error);
}

TEST_CASE("backward on small closed forms") {
  ParamSet ps;
  std::size_t x = ps.add("x", Tensor::scalar(3.0));
  Graph g;
  Var loss = square(g.param(ps, x));
  CHECK_THROWS_AS(g.param_grads(ps), Error);
  g.backward(loss);
  CHECK(g.param_grads(ps)[0].item() == 6.0);

  ParamSet kp;
  std::size_t mu = kp.add("mu", Tensor::vector({1.0}));
  std::size_t ls = kp.add("ls", Tensor::vector({0.0}));
  Graph g2;
  g2.backward(kl_standard_normal(g2.param(kp, mu), g2.param(kp, ls)));
  auto grads = g2.param_grads(kp);
  CHECK(grads[0][0] == 1.0);
  CHECK(grads[1][0] == 0.0);
}

TEST_CASE("every layer agrees with central finite differences") {
  Rng rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    std::size_t in = 1 + rng.index(6);
    std::size_t hid = 1 + rng.index(6);
    std::size_t out = 2 + rng.index(6);
    ParamSet ps;
    Mlp mlp = make_mlp(ps, "mlp", {in, hid, out}, rng);
    RecurrentCell cell = make_recurrent_cell(ps, "rnn", in, hid, rng);
    std::size_t table = ps.add("emb", uniform_init({5, in}, rng, 1.0));
    std::size_t latent = 1 + rng.index(4);
    Mlp head = make_mlp(ps, "head", {hid, 2 * latent}, rng);
    for (std::size_t i = 0; i < ps.size(); ++i) {
      for (double& v : ps.value(i).data()) v = rng.uniform(-0.9, 0.9);
    }
    Tensor x = random_vector(in, rng);
    Tensor eps = random_vector(latent, rng);
    std::size_t target = rng.index(out);

    auto mlp_loss = [&](Graph& g, const ParamSet& p) {
      return categorical_nll(mlp_forward(g, p, mlp, g.constant(x)), target);
    };
    CHECK(max_gradient_error(ps, mlp_loss) < 1e-4);

    auto rnn_loss = [&](Graph& g, const ParamSet& p) {
      std::vector<Var> seq{row(g.param(p, table), 1), g.constant(x), row(g.param(p, table), 4)};
      auto hs = recurrent_forward(g, p, cell, seq);
      return sum(mul(hs.back(), hs.back()));
    };
    CHECK(max_gradient_error(ps, rnn_loss) < 1e-4);

    auto latent_loss = [&](Graph& g, const ParamSet& p) {
      std::vector<Var> seq{g.constant(x)};
      Var h = recurrent_forward(g, p, cell, seq).back();
      Var stats = mlp_forward(g, p, head, h);
      GaussianParams q = gaussian_from_stats(stats, latent);
      Var z = reparameterize(q, eps);
      Var rate = positive_rate(sum(z));
      std::vector<Var> dur{exponential_nll(rate, 0.7)};
      std::vector<Var> loc{categorical_nll(concat(std::vector<Var>{z, h}), 0)};
      return elbo_loss(dur, loc, q).loss;
    };
    CHECK(max_gradient_error(ps, latent_loss) < 1e-4);

    auto misc_loss = [&](Graph& g, const ParamSet& p) {
      Var e = row(g.param(p, table), 2);
      Var a = add(exp(scale(e, 0.3)), log(add_scalar(square(e), 1.0)));
      return sum(sub(one_minus(sigmoid(a)), softplus(scale(a, -1.0))));
    };
    CHECK(max_gradient_error(ps, misc_loss) < 1e-4);
  }
}

TEST_CASE("adam_step") {
  ParamSet ps;
  ps.add("w", Tensor::vector({1.0, -2.0, 0.5}));
  AdamState st = AdamState::for_params(ps);
  adam_step(ps, {Tensor({3}, 0.0)}, st, 0.1);
  CHECK(ps.value(0) == Tensor::vector({1.0, -2.0, 0.5}));

  ParamSet p2;
  p2.add("w", Tensor::vector({1.0, -2.0, 0.5}));
  AdamState s2 = AdamState::for_params(p2);
  double lr = 0.01;
  adam_step(p2, {Tensor::vector({0.3, -4.0, 1e-3})}, s2, lr);
  CHECK(p2.value(0)[0] == doctest::Approx(1.0 - lr).epsilon(1e-9));
  CHECK(p2.value(0)[1] == doctest::Approx(-2.0 + lr).epsilon(1e-9));
  CHECK(p2.value(0)[2] == doctest::Approx(0.5 - lr * (1e-3 / (1e-3 + 1e-8))).epsilon(1e-12));

  CHECK_THROWS_AS(adam_step(p2, {Tensor({2}, 0.0)}, s2, lr), Error);

  // f(w) = (w - 3)^2 decreases step by step.
  ParamSet q;
  q.add("w", Tensor::vector({0.0}));
  AdamState sq = AdamState::for_params(q);
  double prev = 9.0;
  for (int i = 0; i < 2; ++i) {
    Graph g;
    Var loss = square(add_scalar(g.param(q, 0), -3.0));
    g.backward(loss);
    adam_step(q, g.param_grads(q), sq, 0.1);
    double now = (q.value(0)[0] - 3.0) * (q.value(0)[0] - 3.0);
    CHECK(now < prev);
    prev = now;
  }
}

TEST_CASE("seeded initialization is bit-identical") {
  auto build = [](std::uint64_t seed) {
    Rng rng(seed);
    ParamSet ps;
    make_mlp(ps, "m", {3, 8, 2}, rng);
    make_recurrent_cell(ps, "r", 3, 8, rng);
    return ps;
  };
  CHECK(build(42) == build(42));
  CHECK_FALSE(build(42) == build(43));
  ParamSet ps = build(9);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (double v : ps.value(i).data()) CHECK((v >= -kInitScale && v <= kInitScale));
  }
}

TEST_CASE("KL is non-negative and zero only at the prior") {
  Rng rng(6);
  Graph g;
  for (int i = 0; i < 500; ++i) {
    Tensor mu = random_vector(4, rng, 3.0);
    Tensor ls = random_vector(4, rng, 3.0);
    CHECK(kl_standard_normal(g.constant(mu), g.constant(ls)).value().item() >= 0.0);
  }
  CHECK(std::fabs(kl_standard_normal(g.constant(Tensor({4}, 0.0)), g.constant(Tensor({4}, 0.0))).value().item()) <
        1e-12);
  CHECK(kl_standard_normal(g.constant(Tensor::vector({1e-3})), g.constant(Tensor::vector({0.0}))).value().item() >
        0.0);
}

TEST_CASE("softmax outputs are a strictly positive distribution") {
  Rng rng(8);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> logits(1 + rng.index(50));
    for (double& v : logits) v = rng.uniform(-30, 30);
    auto p = softmax(logits);
    CHECK(std::fabs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0) < 1e-12);
    for (double v : p) CHECK(v > 0.0);
  }
}
