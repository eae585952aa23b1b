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

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace tripex {

// Dense row-major matrix of 64-bit reals. Scalars are 1x1, row vectors 1xN,
// column vectors Nx1. All model math runs on doubles.
struct Tensor {
  int rows = 0;
  int cols = 0;
  std::vector<double> v;

  Tensor() = default;
  Tensor(int r, int c) : rows(r), cols(c), v(static_cast<size_t>(r) * static_cast<size_t>(c), 0.0) {}

  static Tensor scalar(double x) {
    Tensor t(1, 1);
    t.v[0] = x;
    return t;
  }

  static Tensor row(const std::vector<double>& xs) {
    Tensor t(1, static_cast<int>(xs.size()));
    t.v = xs;
    return t;
  }

  static Tensor column(const std::vector<double>& xs) {
    Tensor t(static_cast<int>(xs.size()), 1);
    t.v = xs;
    return t;
  }

  double& at(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }

  double* data() { return v.data(); }
  const double* data() const { return v.data(); }

  size_t size() const { return v.size(); }
  bool empty() const { return v.empty(); }
  bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }
  bool operator==(const Tensor& o) const { return rows == o.rows && cols == o.cols && v == o.v; }
};

// Named trainable tensors. Ordered map so iteration (updates, checkpoints,
// gradient reductions) is deterministic.
using ParamStore = std::map<std::string, Tensor>;
using GradMap = std::map<std::string, Tensor>;
using Bindings = std::map<std::string, Tensor>;

// Declared name and shape of one trainable tensor; modules list their
// parameters as ParamShape sequences in a fixed initialization order.
struct ParamShape {
  std::string name;
  int rows;
  int cols;
};

}  // namespace tripex
