// Copyright 2026 The Tripex Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>

#include "tripex/tensor.hpp"

namespace tripex {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Per-parameter first and second moment estimates plus the shared step
// counter. Moment tensors are created lazily on the first update so the
// state can be default-constructed before the parameter set is known.
struct AdamState {
  int64_t step = 0;
  ParamStore m;
  ParamStore v;
};

// One Adam update with bias correction, applied in place. Iterates
// parameters in name order, so repeated runs touch memory identically.
// Throws Error if `grads` is missing a parameter's entry or a shape
// disagrees.
void adam_step(ParamStore& params, const GradMap& grads, AdamState& state,
               const AdamConfig& config);

}  // namespace tripex
