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

#include <doctest.h>

#include <cmath>

#include "tripex/adam.hpp"
#include "tripex/tensor.hpp"
#include "tripex/util.hpp"

namespace tripex {

TEST_CASE("first step moves a parameter by almost exactly the learning rate") {
  ParamStore params;
  params.emplace("p", Tensor::scalar(1.0));
  GradMap grads;
  grads.emplace("p", Tensor::scalar(2.0));
  AdamState state;
  AdamConfig config;
  config.lr = 0.1;

  adam_step(params, grads, state, config);

  // With bias correction the first update is lr * g / (|g| + eps), so the
  // parameter lands a hair above 1 - lr.
  CHECK(state.step == 1);
  CHECK(params.at("p").at(0, 0) == doctest::Approx(0.9).epsilon(1e-8));
  CHECK(params.at("p").at(0, 0) == doctest::Approx(0.9000000005).epsilon(1e-12));
  CHECK(params.at("p").at(0, 0) > 0.9);
}

TEST_CASE("zero gradients leave parameters untouched") {
  ParamStore params;
  params.emplace("p", Tensor::row({0.5, -0.25, 3.0}));
  const Tensor before = params.at("p");
  GradMap grads;
  grads.emplace("p", Tensor(1, 3));
  AdamState state;
  adam_step(params, grads, state, AdamConfig{});
  adam_step(params, grads, state, AdamConfig{});
  CHECK(params.at("p").v == before.v);
  CHECK(state.step == 2);
}

TEST_CASE("repeated steps walk a quadratic bowl downhill") {
  ParamStore params;
  params.emplace("p", Tensor::scalar(3.0));
  AdamState state;
  AdamConfig config;
  config.lr = 0.05;
  double prev = 9.0;
  for (int i = 0; i < 200; ++i) {
    const double p = params.at("p").at(0, 0);
    GradMap grads;
    grads.emplace("p", Tensor::scalar(2.0 * p));  // d/dp of p^2
    adam_step(params, grads, state, config);
  }
  const double p = params.at("p").at(0, 0);
  CHECK(p * p < prev);
  CHECK(std::fabs(p) < 0.5);
}

TEST_CASE("missing or mis-shaped gradient entries are errors") {
  ParamStore params;
  params.emplace("p", Tensor(2, 2));
  AdamState state;
  GradMap empty;
  CHECK_THROWS_AS(adam_step(params, empty, state, AdamConfig{}), Error);
  GradMap wrong;
  wrong.emplace("p", Tensor(2, 3));
  CHECK_THROWS_AS(adam_step(params, wrong, state, AdamConfig{}), Error);
}

}  // namespace tripex
