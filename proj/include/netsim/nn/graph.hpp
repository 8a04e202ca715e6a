// SPDX-License-Identifier: Apache-2.0
//
// Tape-based reverse-mode differentiation over Tensors.
//
// A Graph records every operation applied to its Vars. backward() walks the
// tape in reverse and accumulates exact gradients; param_grads() then returns
// one gradient tensor per entry of the ParamSet the parameters came from.
#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "netsim/nn/tensor.hpp"

namespace netsim::nn {

// Named, value-semantic collection of trainable tensors.
class ParamSet {
 public:
  std::size_t add(std::string name, Tensor init);

  std::size_t size() const { return values_.size(); }
  const Tensor& value(std::size_t i) const { return values_[i]; }
  Tensor& value(std::size_t i) { return values_[i]; }
  const std::string& name(std::size_t i) const { return names_[i]; }
  std::size_t total_scalars() const;

  friend bool operator==(const ParamSet&, const ParamSet&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<Tensor> values_;
};

class Graph;

class Var {
 public:
  Var() = default;
  Var(Graph* g, std::size_t id) : graph_(g), id_(id) {}

  Graph& graph() const { return *graph_; }
  std::size_t id() const { return id_; }
  const Tensor& value() const;
  bool valid() const { return graph_ != nullptr; }

 private:
  Graph* graph_ = nullptr;
  std::size_t id_ = 0;
};

class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, std::size_t self)>;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Tensor value);
  // Leaf bound to params[index]; repeated calls return the same Var.
  Var param(const ParamSet& params, std::size_t index);

  // loss must hold exactly one value.
  void backward(Var loss);
  // Throws GraphNotRecorded when backward() has not run.
  std::vector<Tensor> param_grads(const ParamSet& params) const;
  const Tensor& grad(Var v) const;

  // Op-author interface.
  Var record(Tensor value, std::span<const Var> inputs, BackwardFn fn);
  Var record(Tensor value, std::initializer_list<Var> inputs, BackwardFn fn) {
    return record(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()), std::move(fn));
  }
  const Tensor& value(std::size_t id) const { return nodes_[id].value; }
  const Tensor& grad_of(std::size_t id) const { return nodes_[id].grad; }
  bool needs_grad(Var v) const { return nodes_[v.id()].requires_grad; }
  // Gradient buffer of an input; allocated on first use.
  Tensor& grad_buffer(Var v);
  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    BackwardFn backward;
    bool requires_grad = false;
    std::ptrdiff_t param_index = -1;
  };

  std::vector<Node> nodes_;
  std::vector<std::ptrdiff_t> param_nodes_;
  const ParamSet* bound_params_ = nullptr;
  bool backward_done_ = false;
};

// Elementwise ops require equal shapes.
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double k);
Var add_scalar(Var a, double k);
Var one_minus(Var a);
Var tanh(Var a);
Var sigmoid(Var a);
Var exp(Var a);
Var log(Var a);
Var softplus(Var a);
Var square(Var a);
// Values outside [lo, hi] are clamped and pass no gradient.
Var clamp(Var a, double lo, double hi);
Var sum(Var a);
Var sum(std::span<const Var> terms);

// W [m x n] times x [n] -> [m]
Var matvec(Var w, Var x);
// W x + b
Var affine(Var w, Var x, Var b);
Var concat(std::span<const Var> parts);
Var slice(Var a, std::size_t begin, std::size_t length);
// Row `index` of a [rows x d] table -> [d]
Var row(Var table, std::size_t index);

// -log softmax(logits)[target]
Var categorical_nll(Var logits, std::size_t target);
// rate * value - log(rate) for a scalar rate
Var exponential_nll(Var rate, double value);
// sum over dims of 0.5 * (mu^2 + sigma^2 - 1 - 2 log_sigma)
Var kl_standard_normal(Var mu, Var log_sigma);

// Central-difference check of every gradient produced by `loss_fn`.
// Returns the largest |analytic - numeric| / max(|analytic|, |numeric|, floor).
double max_gradient_error(ParamSet& params, const std::function<Var(Graph&, const ParamSet&)>& loss_fn,
                          double step = 1e-5, double floor = 1e-6);

}  // namespace netsim::nn
