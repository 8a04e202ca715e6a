// SPDX-License-Identifier: Apache-2.0
#include "netsim/nn/adam.hpp"

#include <cmath>

#include <fmt/format.h>

#include "netsim/error.hpp"

namespace netsim::nn {

AdamState AdamState::for_params(const ParamSet& params) {
  AdamState s;
  for (std::size_t i = 0; i < params.size(); ++i) {
    s.first_moment.emplace_back(params.value(i).shape(), 0.0);
    s.second_moment.emplace_back(params.value(i).shape(), 0.0);
  }
  return s;
}

void adam_step(ParamSet& params, const std::vector<Tensor>& grads, AdamState& state, double lr,
               const AdamConfig& config) {
  if (grads.size() != params.size() || state.first_moment.size() != params.size() ||
      state.second_moment.size() != params.size()) {
    fail(ErrorCode::ShapeMismatch, fmt::format("adam_step: {} params, {} grads, {} moments", params.size(),
                                               grads.size(), state.first_moment.size()));
  }
  for (std::size_t p = 0; p < params.size(); ++p) {
    if (!grads[p].same_shape(params.value(p)) || !state.first_moment[p].same_shape(params.value(p)) ||
        !state.second_moment[p].same_shape(params.value(p))) {
      fail(ErrorCode::ShapeMismatch, fmt::format("adam_step: shape mismatch for {}", params.name(p)));
    }
  }
  ++state.step;
  double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor& value = params.value(p);
    Tensor& m = state.first_moment[p];
    Tensor& v = state.second_moment[p];
    const Tensor& g = grads[p];
    for (std::size_t i = 0; i < value.size(); ++i) {
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g[i];
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g[i] * g[i];
      double m_hat = m[i] / c1;
      double v_hat = v[i] / c2;
      value[i] -= lr * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  }
}

}  // namespace netsim::nn
