// SPDX-License-Identifier: Apache-2.0
#include "netsim/nn/graph.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "netsim/error.hpp"

namespace netsim::nn {
namespace {

void require_same_shape(Var a, Var b, const char* op) {
  if (!a.value().same_shape(b.value())) {
    fail(ErrorCode::ShapeMismatch,
         fmt::format("{}: {} vs {}", op, a.value().shape_str(), b.value().shape_str()));
  }
}

// Unary elementwise op given f(x) and f'(x, y) where y = f(x).
template <typename F, typename DF>
Var unary(Var a, F f, DF df) {
  Graph& g = a.graph();
  Tensor out = a.value();
  for (double& v : out.data()) v = f(v);
  return g.record(std::move(out), {a}, [a, df](Graph& g, std::size_t self) {
    if (!g.needs_grad(a)) return;
    const Tensor& x = g.value(a.id());
    const Tensor& y = g.value(self);
    const Tensor& gy = g.grad_of(self);
    Tensor& gx = g.grad_buffer(a);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy[i] * df(x[i], y[i]);
  });
}

}  // namespace

std::size_t ParamSet::add(std::string name, Tensor init) {
  names_.push_back(std::move(name));
  values_.push_back(std::move(init));
  return values_.size() - 1;
}

std::size_t ParamSet::total_scalars() const {
  std::size_t n = 0;
  for (const auto& t : values_) n += t.size();
  return n;
}

const Tensor& Var::value() const { return graph_->value(id_); }

Var Graph::constant(Tensor value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var Graph::param(const ParamSet& params, std::size_t index) {
  if (bound_params_ == nullptr) {
    bound_params_ = &params;
    param_nodes_.assign(params.size(), -1);
  } else if (bound_params_ != &params) {
    fail(ErrorCode::InvalidArgument, "a graph can only bind one parameter set");
  }
  if (index >= params.size()) fail(ErrorCode::InvalidArgument, fmt::format("parameter index {}", index));
  if (param_nodes_[index] >= 0) return Var(this, static_cast<std::size_t>(param_nodes_[index]));
  Node n;
  n.value = params.value(index);
  n.requires_grad = true;
  n.param_index = static_cast<std::ptrdiff_t>(index);
  nodes_.push_back(std::move(n));
  param_nodes_[index] = static_cast<std::ptrdiff_t>(nodes_.size() - 1);
  return Var(this, nodes_.size() - 1);
}

Var Graph::record(Tensor value, std::span<const Var> inputs, BackwardFn fn) {
  Node n;
  n.value = std::move(value);
  for (Var v : inputs) {
    if (&v.graph() != this) fail(ErrorCode::InvalidArgument, "operands belong to different graphs");
    n.requires_grad = n.requires_grad || nodes_[v.id()].requires_grad;
  }
  if (n.requires_grad) n.backward = std::move(fn);
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Tensor& Graph::grad_buffer(Var v) {
  Node& n = nodes_[v.id()];
  if (n.grad.size() != n.value.size()) n.grad = Tensor(n.value.shape(), 0.0);
  return n.grad;
}

void Graph::backward(Var loss) {
  if (loss.value().size() != 1) {
    fail(ErrorCode::ShapeMismatch, fmt::format("backward needs a scalar loss, got {}", loss.value().shape_str()));
  }
  for (auto& n : nodes_) n.grad = Tensor();
  grad_buffer(loss)[0] = 1.0;
  for (std::size_t id = loss.id() + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (!n.backward || n.grad.size() != n.value.size()) continue;
    n.backward(*this, id);
  }
  backward_done_ = true;
}

std::vector<Tensor> Graph::param_grads(const ParamSet& params) const {
  if (!backward_done_) fail(ErrorCode::GraphNotRecorded, "param_grads() before backward()");
  std::vector<Tensor> out;
  out.reserve(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    std::ptrdiff_t node = (bound_params_ == &params && i < param_nodes_.size()) ? param_nodes_[i] : -1;
    if (node >= 0 && nodes_[node].grad.size() == nodes_[node].value.size()) {
      out.push_back(nodes_[node].grad);
    } else {
      out.emplace_back(params.value(i).shape(), 0.0);
    }
  }
  return out;
}

const Tensor& Graph::grad(Var v) const {
  if (!backward_done_) fail(ErrorCode::GraphNotRecorded, "grad() before backward()");
  return nodes_[v.id()].grad;
}

Var add(Var a, Var b) {
  require_same_shape(a, b, "add");
  Tensor out = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  return a.graph().record(std::move(out), {a, b}, [a, b](Graph& g, std::size_t self) {
    const Tensor& gy = g.grad_of(self);
    for (Var in : {a, b}) {
      if (!g.needs_grad(in)) continue;
      Tensor& gx = g.grad_buffer(in);
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy[i];
    }
  });
}

Var sub(Var a, Var b) {
  require_same_shape(a, b, "sub");
  Tensor out = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  return a.graph().record(std::move(out), {a, b}, [a, b](Graph& g, std::size_t self) {
    const Tensor& gy = g.grad_of(self);
    if (g.needs_grad(a)) {
      Tensor& ga = g.grad_buffer(a);
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += gy[i];
    }
    if (g.needs_grad(b)) {
      Tensor& gb = g.grad_buffer(b);
      for (std::size_t i = 0; i < gb.size(); ++i) gb[i] -= gy[i];
    }
  });
}

Var mul(Var a, Var b) {
  require_same_shape(a, b, "mul");
  Tensor out = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  return a.graph().record(std::move(out), {a, b}, [a, b](Graph& g, std::size_t self) {
    const Tensor& gy = g.grad_of(self);
    const Tensor& av = g.value(a.id());
    const Tensor& bv = g.value(b.id());
    if (g.needs_grad(a)) {
      Tensor& ga = g.grad_buffer(a);
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += gy[i] * bv[i];
    }
    if (g.needs_grad(b)) {
      Tensor& gb = g.grad_buffer(b);
      for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += gy[i] * av[i];
    }
  });
}

Var scale(Var a, double k) {
  return unary(a, [k](double x) { return k * x; }, [k](double, double) { return k; });
}

Var add_scalar(Var a, double k) {
  return unary(a, [k](double x) { return x + k; }, [](double, double) { return 1.0; });
}

Var one_minus(Var a) {
  return unary(a, [](double x) { return 1.0 - x; }, [](double, double) { return -1.0; });
}

Var tanh(Var a) {
  return unary(a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Var sigmoid(Var a) {
  return unary(
      a,
      [](double x) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Var exp(Var a) {
  return unary(a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Var log(Var a) {
  return unary(a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Var softplus(Var a) {
  return unary(
      a, [](double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); },
      [](double x, double) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        double e = std::exp(x);
        return e / (1.0 + e);
      });
}

Var square(Var a) {
  return unary(a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Var clamp(Var a, double lo, double hi) {
  return unary(
      a, [lo, hi](double x) { return std::clamp(x, lo, hi); },
      [lo, hi](double x, double) { return (x >= lo && x <= hi) ? 1.0 : 0.0; });
}

Var sum(Var a) {
  double total = 0.0;
  for (double v : a.value().data()) total += v;
  return a.graph().record(Tensor::scalar(total), {a}, [a](Graph& g, std::size_t self) {
    if (!g.needs_grad(a)) return;
    double gy = g.grad_of(self)[0];
    Tensor& gx = g.grad_buffer(a);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy;
  });
}

Var sum(std::span<const Var> terms) {
  if (terms.empty()) fail(ErrorCode::EmptySequence, "sum of no terms");
  Graph& g = terms.front().graph();
  double total = 0.0;
  for (Var t : terms) {
    if (t.value().size() != 1) fail(ErrorCode::ShapeMismatch, "sum(span) expects scalar terms");
    total += t.value()[0];
  }
  std::vector<Var> inputs(terms.begin(), terms.end());
  return g.record(Tensor::scalar(total), terms, [inputs](Graph& g, std::size_t self) {
    double gy = g.grad_of(self)[0];
    for (Var in : inputs) {
      if (g.needs_grad(in)) g.grad_buffer(in)[0] += gy;
    }
  });
}

Var matvec(Var w, Var x) {
  const Tensor& wv = w.value();
  const Tensor& xv = x.value();
  if (wv.rank() != 2 || xv.rank() != 1 || wv.cols() != xv.size()) {
    fail(ErrorCode::ShapeMismatch, fmt::format("matvec: {} x {}", wv.shape_str(), xv.shape_str()));
  }
  std::size_t m = wv.rows();
  std::size_t n = wv.cols();
  Tensor out({m}, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double* wr = wv.data().data() + i * n;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += wr[j] * xv[j];
    out[i] = acc;
  }
  return w.graph().record(std::move(out), {w, x}, [w, x, m, n](Graph& g, std::size_t self) {
    const Tensor& gy = g.grad_of(self);
    const Tensor& wv = g.value(w.id());
    const Tensor& xv = g.value(x.id());
    if (g.needs_grad(w)) {
      Tensor& gw = g.grad_buffer(w);
      for (std::size_t i = 0; i < m; ++i) {
        double gi = gy[i];
        if (gi == 0.0) continue;
        double* row = gw.data().data() + i * n;
        for (std::size_t j = 0; j < n; ++j) row[j] += gi * xv[j];
      }
    }
    if (g.needs_grad(x)) {
      Tensor& gx = g.grad_buffer(x);
      for (std::size_t i = 0; i < m; ++i) {
        double gi = gy[i];
        if (gi == 0.0) continue;
        const double* row = wv.data().data() + i * n;
        for (std::size_t j = 0; j < n; ++j) gx[j] += gi * row[j];
      }
    }
  });
}

Var affine(Var w, Var x, Var b) {
  Var wx = matvec(w, x);
  return add(wx, b);
}

Var concat(std::span<const Var> parts) {
  if (parts.empty()) fail(ErrorCode::EmptySequence, "concat of no parts");
  Graph& g = parts.front().graph();
  std::vector<double> values;
  std::vector<Var> inputs(parts.begin(), parts.end());
  for (Var p : parts) {
    if (p.value().rank() > 1) fail(ErrorCode::ShapeMismatch, "concat expects vectors or scalars");
    values.insert(values.end(), p.value().data().begin(), p.value().data().end());
  }
  auto fn = [inputs](Graph& g, std::size_t self) {
    const Tensor& gy = g.grad_of(self);
    std::size_t offset = 0;
    for (Var in : inputs) {
      std::size_t n = g.value(in.id()).size();
      if (g.needs_grad(in)) {
        Tensor& gx = g.grad_buffer(in);
        for (std::size_t i = 0; i < n; ++i) gx[i] += gy[offset + i];
      }
      offset += n;
    }
  };
  return g.record(Tensor::vector(std::move(values)), parts, fn);
}

Var slice(Var a, std::size_t begin, std::size_t length) {
  const Tensor& av = a.value();
  if (av.rank() != 1 || begin + length > av.size()) {
    fail(ErrorCode::ShapeMismatch, fmt::format("slice [{}, +{}) of {}", begin, length, av.shape_str()));
  }
  std::vector<double> values(av.data().begin() + begin, av.data().begin() + begin + length);
  return a.graph().record(Tensor::vector(std::move(values)), {a}, [a, begin, length](Graph& g, std::size_t self) {
    if (!g.needs_grad(a)) return;
    const Tensor& gy = g.grad_of(self);
    Tensor& gx = g.grad_buffer(a);
    for (std::size_t i = 0; i < length; ++i) gx[begin + i] += gy[i];
  });
}

Var row(Var table, std::size_t index) {
  const Tensor& tv = table.value();
  if (tv.rank() != 2 || index >= tv.rows()) {
    fail(ErrorCode::ShapeMismatch, fmt::format("row {} of {}", index, tv.shape_str()));
  }
  std::size_t d = tv.cols();
  std::vector<double> values(tv.data().begin() + index * d, tv.data().begin() + (index + 1) * d);
  return table.graph().record(Tensor::vector(std::move(values)), {table}, [table, index, d](Graph& g, std::size_t self) {
    if (!g.needs_grad(table)) return;
    const Tensor& gy = g.grad_of(self);
    Tensor& gt = g.grad_buffer(table);
    for (std::size_t i = 0; i < d; ++i) gt[index * d + i] += gy[i];
  });
}

Var categorical_nll(Var logits, std::size_t target) {
  const Tensor& lv = logits.value();
  if (lv.rank() != 1 || target >= lv.size()) {
    fail(ErrorCode::ShapeMismatch, fmt::format("categorical_nll target {} for logits {}", target, lv.shape_str()));
  }
  std::vector<double> p = softmax(lv.data());
  double m = *std::max_element(lv.data().begin(), lv.data().end());
  double lse = 0.0;
  for (double v : lv.data()) lse += std::exp(v - m);
  double nll = m + std::log(lse) - lv[target];
  return logits.graph().record(Tensor::scalar(nll), {logits},
                               [logits, target, p = std::move(p)](Graph& g, std::size_t self) {
                                 if (!g.needs_grad(logits)) return;
                                 double gy = g.grad_of(self)[0];
                                 Tensor& gx = g.grad_buffer(logits);
                                 for (std::size_t i = 0; i < gx.size(); ++i) {
                                   gx[i] += gy * (p[i] - (i == target ? 1.0 : 0.0));
                                 }
                               });
}

Var exponential_nll(Var rate, double value) {
  const Tensor& rv = rate.value();
  if (rv.size() != 1) fail(ErrorCode::ShapeMismatch, "exponential_nll expects a scalar rate");
  double lambda = rv[0];
  if (!(lambda > 0.0)) fail(ErrorCode::NonFinite, fmt::format("exponential rate {} must be > 0", lambda));
  double nll = lambda * value - std::log(lambda);
  return rate.graph().record(Tensor::scalar(nll), {rate}, [rate, value](Graph& g, std::size_t self) {
    if (!g.needs_grad(rate)) return;
    double lambda = g.value(rate.id())[0];
    g.grad_buffer(rate)[0] += g.grad_of(self)[0] * (value - 1.0 / lambda);
  });
}

Var kl_standard_normal(Var mu, Var log_sigma) {
  require_same_shape(mu, log_sigma, "kl_standard_normal");
  const Tensor& m = mu.value();
  const Tensor& ls = log_sigma.value();
  double kl = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    kl += 0.5 * (m[i] * m[i] + std::exp(2.0 * ls[i]) - 1.0 - 2.0 * ls[i]);
  }
  return mu.graph().record(Tensor::scalar(kl), {mu, log_sigma}, [mu, log_sigma](Graph& g, std::size_t self) {
    double gy = g.grad_of(self)[0];
    const Tensor& m = g.value(mu.id());
    const Tensor& ls = g.value(log_sigma.id());
    if (g.needs_grad(mu)) {
      Tensor& gm = g.grad_buffer(mu);
      for (std::size_t i = 0; i < gm.size(); ++i) gm[i] += gy * m[i];
    }
    if (g.needs_grad(log_sigma)) {
      Tensor& gl = g.grad_buffer(log_sigma);
      for (std::size_t i = 0; i < gl.size(); ++i) gl[i] += gy * (std::exp(2.0 * ls[i]) - 1.0);
    }
  });
}

double max_gradient_error(ParamSet& params, const std::function<Var(Graph&, const ParamSet&)>& loss_fn, double step,
                          double floor) {
  std::vector<Tensor> analytic;
  {
    Graph g;
    Var loss = loss_fn(g, params);
    g.backward(loss);
    analytic = g.param_grads(params);
  }
  auto eval = [&]() {
    Graph g;
    return loss_fn(g, params).value().item();
  };
  double worst = 0.0;
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor& value = params.value(p);
    for (std::size_t i = 0; i < value.size(); ++i) {
      double saved = value[i];
      value[i] = saved + step;
      double up = eval();
      value[i] = saved - step;
      double down = eval();
      value[i] = saved;
      double numeric = (up - down) / (2.0 * step);
      double a = analytic[p][i];
      double denom = std::max({std::fabs(a), std::fabs(numeric), floor});
      worst = std::max(worst, std::fabs(a - numeric) / denom);
    }
  }
  return worst;
}

}  // namespace netsim::nn
