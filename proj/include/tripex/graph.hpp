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

#include <map>
#include <string>
#include <vector>

#include "tripex/tensor.hpp"

namespace tripex {

// Primitive differentiable operations. The set is deliberately minimal:
// just enough to express the embedding lookup, transformer and LSTM
// encoders, the sigmoid taggers, and the tagging cross-entropy losses.
enum class Op {
  kConstant,     // fixed tensor baked into the graph
  kPlaceholder,  // named input bound at evaluation time
  kParameter,    // named trainable tensor, read from the parameter store
  kGatherRows,   // select rows of the input by a fixed index list
  kMatMul,       // A * B
  kMatMulNT,     // A * B^T
  kAdd,          // elementwise sum, same shape
  kAddRowwise,   // X + r with a 1-row vector broadcast across rows
  kHadamard,     // elementwise product, same shape
  kScale,        // multiply by a fixed scalar
  kSigmoid,      // elementwise logistic
  kTanh,         // elementwise tanh
  kLog,          // elementwise natural log
  kSoftmaxRows,  // softmax over each row
  kNormRows,     // standardize each row: (x - mean) / sqrt(var + eps)
  kMeanRows,     // column means: n x d -> 1 x d
  kConcatRows,   // stack inputs vertically
  kConcatCols,   // stack inputs horizontally
  kSliceCols,    // fixed column range [c0, c1)
  kBce,          // elementwise binary cross-entropy against a target tensor
  kSum,          // total of all entries: 1 x 1
};

const char* op_name(Op op);

struct Node {
  Op op;
  int rows = 0;
  int cols = 0;
  std::vector<int> inputs;
  double factor = 1.0;       // kScale multiplier
  std::vector<int> indices;  // kGatherRows source rows
  int c0 = 0;                // kSliceCols range start
  int c1 = 0;                // kSliceCols range end (exclusive)
  std::string name;          // kParameter / kPlaceholder
  Tensor value;              // kConstant payload
};

// Row standardization epsilon inside kNormRows.
inline constexpr double kNormEpsilon = 1e-5;

// kBce clamps probabilities to [kProbFloor, 1 - kProbFloor] before taking
// logs; the clamped region contributes zero gradient.
inline constexpr double kProbFloor = 1e-12;

// A differentiable expression built once and then treated as an immutable
// value. Nodes are appended in topological order (an input id is always
// smaller than its consumer), shapes are checked at build time, and every
// builder returns the new node's id. Parameter and placeholder nodes are
// deduplicated by name. Parameter *values* live outside the graph in a
// ParamStore so one graph can be evaluated against successive parameter
// versions during training.
class ExprGraph {
 public:
  int constant(Tensor t);
  int scalar(double x) { return constant(Tensor::scalar(x)); }
  int placeholder(const std::string& name, int rows, int cols);
  int parameter(const std::string& name, int rows, int cols);

  int gather_rows(int src, std::vector<int> rows);
  int matmul(int a, int b);
  int matmul_nt(int a, int b);
  int add(int a, int b);
  int add_rowwise(int x, int row);
  int hadamard(int a, int b);
  int scale(int a, double factor);
  int sigmoid(int a);
  int tanh(int a);
  int log(int a);
  int softmax_rows(int a);
  int norm_rows(int a);
  int mean_rows(int a);
  int concat_rows(const std::vector<int>& parts);
  int concat_cols(const std::vector<int>& parts);
  int slice_cols(int a, int c0, int c1);
  int bce(int probs, int targets);
  int sum(int a);

  // x * w + b with the 1-row bias broadcast across rows.
  int affine(int x, int w, int b) { return add_rowwise(matmul(x, w), b); }

  const Node& node(int id) const { return nodes_[static_cast<size_t>(id)]; }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  int rows(int id) const { return node(id).rows; }
  int cols(int id) const { return node(id).cols; }

  // name -> node id for declared parameters / placeholders.
  const std::map<std::string, int>& parameter_nodes() const { return params_; }
  const std::map<std::string, int>& placeholder_nodes() const { return placeholders_; }

 private:
  int push(Node n);
  void require(int id) const;
  [[noreturn]] void fail(Op op, const std::string& message) const;

  std::vector<Node> nodes_;
  std::map<std::string, int> params_;
  std::map<std::string, int> placeholders_;
};

struct EvalResult {
  std::vector<Tensor> values;  // indexed by node id
};

// Forward pass. Pure: identical (graph, params, bindings) give bitwise
// identical values. Throws Error, naming the offending node, when a
// placeholder is unbound, a parameter is missing from the store, or a bound
// tensor's shape disagrees with the declaration.
EvalResult evaluate(const ExprGraph& graph, const ParamStore& params, const Bindings& bindings);

// Reverse-mode gradient of the scalar node `loss` with respect to every
// entry of `params`. Parameters the loss does not depend on get zero
// tensors. All reductions run in a fixed order, so results are bitwise
// reproducible. Optionally hands back the forward values and the loss.
GradMap gradient(const ExprGraph& graph, const ParamStore& params, const Bindings& bindings,
                 int loss, EvalResult* forward = nullptr, double* loss_value = nullptr);

}  // namespace tripex
