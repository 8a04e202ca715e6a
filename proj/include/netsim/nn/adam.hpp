// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "netsim/nn/graph.hpp"

namespace netsim::nn {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<Tensor> first_moment;
  std::vector<Tensor> second_moment;
  std::int64_t step = 0;

  static AdamState for_params(const ParamSet& params);
};

// One bias-corrected adaptive-moment update of every parameter.
void adam_step(ParamSet& params, const std::vector<Tensor>& grads, AdamState& state, double lr,
               const AdamConfig& config = {});

}  // namespace netsim::nn
