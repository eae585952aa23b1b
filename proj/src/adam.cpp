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

#include "tripex/adam.hpp"

#include <cmath>

#include "tripex/util.hpp"

namespace tripex {

void adam_step(ParamStore& params, const GradMap& grads, AdamState& state,
               const AdamConfig& config) {
  state.step += 1;
  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (auto& [name, p] : params) {
    auto git = grads.find(name);
    if (git == grads.end()) throw Error("adam_step: no gradient for parameter '" + name + "'");
    const Tensor& g = git->second;
    if (!g.same_shape(p)) throw Error("adam_step: gradient shape mismatch for '" + name + "'");
    Tensor& m = state.m.try_emplace(name, Tensor(p.rows, p.cols)).first->second;
    Tensor& v = state.v.try_emplace(name, Tensor(p.rows, p.cols)).first->second;
    for (size_t i = 0; i < p.size(); ++i) {
      m.v[i] = config.beta1 * m.v[i] + (1.0 - config.beta1) * g.v[i];
      v.v[i] = config.beta2 * v.v[i] + (1.0 - config.beta2) * g.v[i] * g.v[i];
      const double mhat = m.v[i] / bc1;
      const double vhat = v.v[i] / bc2;
      p.v[i] -= config.lr * mhat / (std::sqrt(vhat) + config.epsilon);
    }
  }
}

}  // namespace tripex
