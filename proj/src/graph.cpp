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

#include "tripex/graph.hpp"

#include <cmath>
#include <cstddef>

#include "tripex/kernels.hpp"
#include "tripex/util.hpp"

namespace tripex {

const char* op_name(Op op) {
  switch (op) {
    case Op::kConstant: return "constant";
    case Op::kPlaceholder: return "placeholder";
    case Op::kParameter: return "parameter";
    case Op::kGatherRows: return "gather_rows";
    case Op::kMatMul: return "matmul";
    case Op::kMatMulNT: return "matmul_nt";
    case Op::kAdd: return "add";
    case Op::kAddRowwise: return "add_rowwise";
    case Op::kHadamard: return "hadamard";
    case Op::kScale: return "scale";
    case Op::kSigmoid: return "sigmoid";
    case Op::kTanh: return "tanh";
    case Op::kLog: return "log";
    case Op::kSoftmaxRows: return "softmax_rows";
    case Op::kNormRows: return "norm_rows";
    case Op::kMeanRows: return "mean_rows";
    case Op::kConcatRows: return "concat_rows";
    case Op::kConcatCols: return "concat_cols";
    case Op::kSliceCols: return "slice_cols";
    case Op::kBce: return "bce";
    case Op::kSum: return "sum";
  }
  return "?";
}

int ExprGraph::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

void ExprGraph::require(int id) const {
  if (id < 0 || id >= node_count()) {
    throw Error("graph: input id " + std::to_string(id) + " out of range");
  }
}

void ExprGraph::fail(Op op, const std::string& message) const {
  throw Error("graph node " + std::to_string(node_count()) + " (" + op_name(op) +
              "): " + message);
}

int ExprGraph::constant(Tensor t) {
  if (t.rows < 1 || t.cols < 1) fail(Op::kConstant, "empty tensor");
  Node n{Op::kConstant, t.rows, t.cols, {}, 1.0, {}, 0, 0, "", std::move(t)};
  return push(std::move(n));
}

int ExprGraph::placeholder(const std::string& name, int rows, int cols) {
  if (name.empty()) fail(Op::kPlaceholder, "empty name");
  if (rows < 1 || cols < 1) fail(Op::kPlaceholder, "empty shape for '" + name + "'");
  auto it = placeholders_.find(name);
  if (it != placeholders_.end()) {
    const Node& prior = node(it->second);
    if (prior.rows != rows || prior.cols != cols) {
      fail(Op::kPlaceholder, "'" + name + "' redeclared with a different shape");
    }
    return it->second;
  }
  Node n{Op::kPlaceholder, rows, cols, {}, 1.0, {}, 0, 0, name, {}};
  int id = push(std::move(n));
  placeholders_[name] = id;
  return id;
}

int ExprGraph::parameter(const std::string& name, int rows, int cols) {
  if (name.empty()) fail(Op::kParameter, "empty name");
  if (rows < 1 || cols < 1) fail(Op::kParameter, "empty shape for '" + name + "'");
  auto it = params_.find(name);
  if (it != params_.end()) {
    const Node& prior = node(it->second);
    if (prior.rows != rows || prior.cols != cols) {
      fail(Op::kParameter, "'" + name + "' redeclared with a different shape");
    }
    return it->second;
  }
  Node n{Op::kParameter, rows, cols, {}, 1.0, {}, 0, 0, name, {}};
  int id = push(std::move(n));
  params_[name] = id;
  return id;
}

int ExprGraph::gather_rows(int src, std::vector<int> rows) {
  require(src);
  if (rows.empty()) fail(Op::kGatherRows, "empty index list");
  for (int r : rows) {
    if (r < 0 || r >= this->rows(src)) {
      fail(Op::kGatherRows, "index " + std::to_string(r) + " outside the " +
                                std::to_string(this->rows(src)) + " rows of input " +
                                std::to_string(src));
    }
  }
  Node n{Op::kGatherRows, static_cast<int>(rows.size()), cols(src), {src}, 1.0,
         std::move(rows), 0, 0, "", {}};
  return push(std::move(n));
}

int ExprGraph::matmul(int a, int b) {
  require(a);
  require(b);
  if (cols(a) != rows(b)) {
    fail(Op::kMatMul, "inner dimensions " + std::to_string(cols(a)) + " vs " +
                          std::to_string(rows(b)));
  }
  Node n{Op::kMatMul, rows(a), cols(b), {a, b}, 1.0, {}, 0, 0, "", {}};
  return push(std::move(n));
}

int ExprGraph::matmul_nt(int a, int b) {
  require(a);
  require(b);
  if (cols(a) != cols(b)) {
    fail(Op::kMatMulNT, "inner dimensions " + std::to_string(cols(a)) + " vs " +
                            std::to_string(cols(b)));
  }
  Node n{Op::kMatMulNT, rows(a), rows(b), {a, b}, 1.0, {}, 0, 0, "", {}};
  return push(std::move(n));
}

int ExprGraph::add(int a, int b) {
  require(a);
  require(b);
  if (rows(a) != rows(b) || cols(a) != cols(b)) fail(Op::kAdd, "shape mismatch");
  Node n{Op::kAdd, rows(a), cols(a), {a, b}, 1.0, {}, 0, 0, "", {}};
  return push(std::move(n));
}

int ExprGraph::add_rowwise(int x, int row) {
  require(x);
  require(row);
  if (rows(row) != 1 || cols(row) != cols(x)) {
    fail(Op::kAddRowwise, "broadcast operand must be 1 x " + std::to_string(cols(x)));
  }
  Node n{Op::kAddRowwise, rows(x), cols(x), {x, row}, 1.0, {}, 0, 0, "", {}};
  return push(std::move(n));
}

int ExprGraph::hadamard(int a, int b) {
  require(a);
  require(b);
  if (rows(a) != rows(b) || cols(a) != cols(b)) fail(Op::kHadamard, "shape mismatch");
  Node n{Op::kHadamard, rows(a), cols(a), {a, b}, 1.0, {}, 0, 0, "", {}};
  return push(std::move(n));
}

int ExprGraph::scale(int a, double factor) {
  require(a);
  Node n{Op::kScale, rows(a), cols(a), {a}, factor, {}, 0, 0, "", {}};
  return push(std::move(n));
}

int ExprGraph::sigmoid(int a) {
  require(a);
  Node n{Op::kSigmoid, rows(a), cols(a), {a}, 1.0, {}, 0, 0, "", {}};
  return push(std::move(n));
}

int ExprGraph::tanh(int a) {
  require(a);
  Node n{Op::kTanh, rows(a), cols(a), {a}, 1.0, {}, 0, 0, "", {}};
  return push(std::move(n));
}

int ExprGraph::log(int a) {
  require(a);
  Node n{Op::kLog, rows(a), cols(a), {a}, 1.0, {}, 0, 0, "", {}};
  return push(std::move(n));
}

int ExprGraph::softmax_rows(int a) {
  require(a);
  Node n{Op::kSoftmaxRows, rows(a), cols(a), {a}, 1.0, {}, 0, 0, "", {}};
  return push(std::move(n));
}

int ExprGraph::norm_rows(int a) {
  require(a);
  Node n{Op::kNormRows, rows(a), cols(a), {a}, 1.0, {}, 0, 0, "", {}};
  return push(std::move(n));
}

int ExprGraph::mean_rows(int a) {
  require(a);
  Node n{Op::kMeanRows, 1, cols(a), {a}, 1.0, {}, 0, 0, "", {}};
  return push(std::move(n));
}

int ExprGraph::concat_rows(const std::vector<int>& parts) {
  if (parts.empty()) fail(Op::kConcatRows, "no inputs");
  int total = 0;
  for (int p : parts) {
    require(p);
    if (cols(p) != cols(parts[0])) fail(Op::kConcatRows, "column mismatch");
    total += rows(p);
  }
  Node n{Op::kConcatRows, total, cols(parts[0]), parts, 1.0, {}, 0, 0, "", {}};
  return push(std::move(n));
}

int ExprGraph::concat_cols(const std::vector<int>& parts) {
  if (parts.empty()) fail(Op::kConcatCols, "no inputs");
  int total = 0;
  for (int p : parts) {
    require(p);
    if (rows(p) != rows(parts[0])) fail(Op::kConcatCols, "row mismatch");
    total += cols(p);
  }
  Node n{Op::kConcatCols, rows(parts[0]), total, parts, 1.0, {}, 0, 0, "", {}};
  return push(std::move(n));
}

int ExprGraph::slice_cols(int a, int c0, int c1) {
  require(a);
  if (c0 < 0 || c1 <= c0 || c1 > cols(a)) {
    fail(Op::kSliceCols, "range [" + std::to_string(c0) + ", " + std::to_string(c1) +
                             ") invalid for " + std::to_string(cols(a)) + " columns");
  }
  Node n{Op::kSliceCols, rows(a), c1 - c0, {a}, 1.0, {}, c0, c1, "", {}};
  return push(std::move(n));
}

int ExprGraph::bce(int probs, int targets) {
  require(probs);
  require(targets);
  if (rows(probs) != rows(targets) || cols(probs) != cols(targets)) {
    fail(Op::kBce, "shape mismatch");
  }
  Node n{Op::kBce, rows(probs), cols(probs), {probs, targets}, 1.0, {}, 0, 0, "", {}};
  return push(std::move(n));
}

int ExprGraph::sum(int a) {
  require(a);
  Node n{Op::kSum, 1, 1, {a}, 1.0, {}, 0, 0, "", {}};
  return push(std::move(n));
}

namespace {

[[noreturn]] void eval_fail(int id, const Node& n, const std::string& message) {
  throw Error("graph node " + std::to_string(id) + " (" + op_name(n.op) + "): " + message);
}

inline double clamp_prob(double p) {
  if (p < kProbFloor) return kProbFloor;
  if (p > 1.0 - kProbFloor) return 1.0 - kProbFloor;
  return p;
}

void forward_node(int id, const Node& n, const std::vector<Tensor>& vals,
                  const ParamStore& params, const Bindings& bindings, Tensor& out) {
  switch (n.op) {
    case Op::kConstant:
      out = n.value;
      break;
    case Op::kPlaceholder: {
      auto it = bindings.find(n.name);
      if (it == bindings.end()) eval_fail(id, n, "placeholder '" + n.name + "' unbound");
      if (it->second.rows != n.rows || it->second.cols != n.cols) {
        eval_fail(id, n, "binding for '" + n.name + "' has shape " +
                             std::to_string(it->second.rows) + " x " +
                             std::to_string(it->second.cols) + ", declared " +
                             std::to_string(n.rows) + " x " + std::to_string(n.cols));
      }
      out = it->second;
      break;
    }
    case Op::kParameter: {
      auto it = params.find(n.name);
      if (it == params.end()) {
        eval_fail(id, n, "parameter '" + n.name + "' missing from the store");
      }
      if (it->second.rows != n.rows || it->second.cols != n.cols) {
        eval_fail(id, n, "parameter '" + n.name + "' has shape " +
                             std::to_string(it->second.rows) + " x " +
                             std::to_string(it->second.cols) + ", declared " +
                             std::to_string(n.rows) + " x " + std::to_string(n.cols));
      }
      out = it->second;
      break;
    }
    case Op::kGatherRows: {
      const Tensor& x = vals[n.inputs[0]];
      out = Tensor(n.rows, n.cols);
      for (int t = 0; t < n.rows; ++t) {
        const double* src = x.data() + static_cast<size_t>(n.indices[t]) * x.cols;
        double* dst = out.data() + static_cast<size_t>(t) * out.cols;
        for (int j = 0; j < n.cols; ++j) dst[j] = src[j];
      }
      break;
    }
    case Op::kMatMul: {
      const Tensor& a = vals[n.inputs[0]];
      const Tensor& b = vals[n.inputs[1]];
      out = Tensor(n.rows, n.cols);
      kern::matmul_nn(a.data(), b.data(), out.data(), a.rows, a.cols, b.cols);
      break;
    }
    case Op::kMatMulNT: {
      const Tensor& a = vals[n.inputs[0]];
      const Tensor& b = vals[n.inputs[1]];
      out = Tensor(n.rows, n.cols);
      kern::matmul_nt(a.data(), b.data(), out.data(), a.rows, a.cols, b.rows);
      break;
    }
    case Op::kAdd: {
      const Tensor& a = vals[n.inputs[0]];
      const Tensor& b = vals[n.inputs[1]];
      out = Tensor(n.rows, n.cols);
      for (size_t i = 0; i < out.size(); ++i) out.v[i] = a.v[i] + b.v[i];
      break;
    }
    case Op::kAddRowwise: {
      const Tensor& x = vals[n.inputs[0]];
      const Tensor& r = vals[n.inputs[1]];
      out = Tensor(n.rows, n.cols);
      for (int i = 0; i < n.rows; ++i) {
        const double* xi = x.data() + static_cast<size_t>(i) * n.cols;
        double* oi = out.data() + static_cast<size_t>(i) * n.cols;
        for (int j = 0; j < n.cols; ++j) oi[j] = xi[j] + r.v[static_cast<size_t>(j)];
      }
      break;
    }
    case Op::kHadamard: {
      const Tensor& a = vals[n.inputs[0]];
      const Tensor& b = vals[n.inputs[1]];
      out = Tensor(n.rows, n.cols);
      for (size_t i = 0; i < out.size(); ++i) out.v[i] = a.v[i] * b.v[i];
      break;
    }
    case Op::kScale: {
      const Tensor& x = vals[n.inputs[0]];
      out = Tensor(n.rows, n.cols);
      for (size_t i = 0; i < out.size(); ++i) out.v[i] = n.factor * x.v[i];
      break;
    }
    case Op::kSigmoid: {
      const Tensor& x = vals[n.inputs[0]];
      out = Tensor(n.rows, n.cols);
      for (size_t i = 0; i < out.size(); ++i) out.v[i] = 1.0 / (1.0 + std::exp(-x.v[i]));
      break;
    }
    case Op::kTanh: {
      const Tensor& x = vals[n.inputs[0]];
      out = Tensor(n.rows, n.cols);
      for (size_t i = 0; i < out.size(); ++i) out.v[i] = std::tanh(x.v[i]);
      break;
    }
    case Op::kLog: {
      const Tensor& x = vals[n.inputs[0]];
      out = Tensor(n.rows, n.cols);
      for (size_t i = 0; i < out.size(); ++i) out.v[i] = std::log(x.v[i]);
      break;
    }
    case Op::kSoftmaxRows: {
      const Tensor& x = vals[n.inputs[0]];
      out = Tensor(n.rows, n.cols);
      for (int i = 0; i < n.rows; ++i) {
        const double* xi = x.data() + static_cast<size_t>(i) * n.cols;
        double* oi = out.data() + static_cast<size_t>(i) * n.cols;
        double hi = xi[0];
        for (int j = 1; j < n.cols; ++j) {
          if (xi[j] > hi) hi = xi[j];
        }
        double total = 0.0;
        for (int j = 0; j < n.cols; ++j) {
          oi[j] = std::exp(xi[j] - hi);
          total += oi[j];
        }
        for (int j = 0; j < n.cols; ++j) oi[j] /= total;
      }
      break;
    }
    case Op::kNormRows: {
      const Tensor& x = vals[n.inputs[0]];
      out = Tensor(n.rows, n.cols);
      for (int i = 0; i < n.rows; ++i) {
        const double* xi = x.data() + static_cast<size_t>(i) * n.cols;
        double* oi = out.data() + static_cast<size_t>(i) * n.cols;
        double mean = 0.0;
        for (int j = 0; j < n.cols; ++j) mean += xi[j];
        mean /= n.cols;
        double var = 0.0;
        for (int j = 0; j < n.cols; ++j) var += (xi[j] - mean) * (xi[j] - mean);
        var /= n.cols;
        const double inv = 1.0 / std::sqrt(var + kNormEpsilon);
        for (int j = 0; j < n.cols; ++j) oi[j] = (xi[j] - mean) * inv;
      }
      break;
    }
    case Op::kMeanRows: {
      const Tensor& x = vals[n.inputs[0]];
      out = Tensor(1, n.cols);
      for (int i = 0; i < x.rows; ++i) {
        const double* xi = x.data() + static_cast<size_t>(i) * n.cols;
        for (int j = 0; j < n.cols; ++j) out.v[static_cast<size_t>(j)] += xi[j];
      }
      for (int j = 0; j < n.cols; ++j) out.v[static_cast<size_t>(j)] /= x.rows;
      break;
    }
    case Op::kConcatRows: {
      out = Tensor(n.rows, n.cols);
      int off = 0;
      for (int p : n.inputs) {
        const Tensor& x = vals[p];
        for (size_t i = 0; i < x.size(); ++i) {
          out.v[static_cast<size_t>(off) * n.cols + i] = x.v[i];
        }
        off += x.rows;
      }
      break;
    }
    case Op::kConcatCols: {
      out = Tensor(n.rows, n.cols);
      int off = 0;
      for (int p : n.inputs) {
        const Tensor& x = vals[p];
        for (int i = 0; i < x.rows; ++i) {
          for (int j = 0; j < x.cols; ++j) out.at(i, off + j) = x.at(i, j);
        }
        off += x.cols;
      }
      break;
    }
    case Op::kSliceCols: {
      const Tensor& x = vals[n.inputs[0]];
      out = Tensor(n.rows, n.cols);
      for (int i = 0; i < n.rows; ++i) {
        for (int j = 0; j < n.cols; ++j) out.at(i, j) = x.at(i, n.c0 + j);
      }
      break;
    }
    case Op::kBce: {
      const Tensor& p = vals[n.inputs[0]];
      const Tensor& y = vals[n.inputs[1]];
      out = Tensor(n.rows, n.cols);
      for (size_t i = 0; i < out.size(); ++i) {
        const double ph = clamp_prob(p.v[i]);
        out.v[i] = -(y.v[i] * std::log(ph) + (1.0 - y.v[i]) * std::log(1.0 - ph));
      }
      break;
    }
    case Op::kSum: {
      const Tensor& x = vals[n.inputs[0]];
      out = Tensor(1, 1);
      double total = 0.0;
      for (size_t i = 0; i < x.size(); ++i) total += x.v[i];
      out.v[0] = total;
      break;
    }
  }
}

}  // namespace

EvalResult evaluate(const ExprGraph& graph, const ParamStore& params, const Bindings& bindings) {
  EvalResult result;
  result.values.resize(static_cast<size_t>(graph.node_count()));
  for (int id = 0; id < graph.node_count(); ++id) {
    forward_node(id, graph.node(id), result.values, params, bindings,
                 result.values[static_cast<size_t>(id)]);
  }
  return result;
}

namespace {

// Lazily zero-initialized adjoint for a node.
Tensor& adjoint(std::vector<Tensor>& adj, const ExprGraph& g, int id) {
  Tensor& t = adj[static_cast<size_t>(id)];
  if (t.rows == 0) t = Tensor(g.rows(id), g.cols(id));
  return t;
}

}  // namespace

GradMap gradient(const ExprGraph& graph, const ParamStore& params, const Bindings& bindings,
                 int loss, EvalResult* forward, double* loss_value) {
  if (loss < 0 || loss >= graph.node_count()) {
    throw Error("gradient: loss node id " + std::to_string(loss) + " out of range");
  }
  if (graph.rows(loss) != 1 || graph.cols(loss) != 1) {
    throw Error("gradient: loss node " + std::to_string(loss) + " has shape " +
                std::to_string(graph.rows(loss)) + " x " + std::to_string(graph.cols(loss)) +
                ", expected a scalar");
  }

  EvalResult local;
  EvalResult& fwd = forward != nullptr ? *forward : local;
  fwd = evaluate(graph, params, bindings);
  if (loss_value != nullptr) *loss_value = fwd.values[static_cast<size_t>(loss)].v[0];
  const std::vector<Tensor>& vals = fwd.values;

  // A node needs an adjoint only if a parameter sits somewhere below it.
  std::vector<char> needs(static_cast<size_t>(graph.node_count()), 0);
  for (int id = 0; id < graph.node_count(); ++id) {
    const Node& n = graph.node(id);
    char flag = n.op == Op::kParameter ? 1 : 0;
    for (int in : n.inputs) flag |= needs[static_cast<size_t>(in)];
    needs[static_cast<size_t>(id)] = flag;
  }

  GradMap grads;
  for (const auto& [name, tensor] : params) grads[name] = Tensor(tensor.rows, tensor.cols);

  std::vector<Tensor> adj(static_cast<size_t>(graph.node_count()));
  if (needs[static_cast<size_t>(loss)]) adjoint(adj, graph, loss).v[0] = 1.0;

  // Inputs always precede consumers, so one descending sweep suffices.
  for (int id = loss; id >= 0; --id) {
    if (adj[static_cast<size_t>(id)].rows == 0) continue;
    const Node& n = graph.node(id);
    const Tensor& dy = adj[static_cast<size_t>(id)];
    switch (n.op) {
      case Op::kConstant:
      case Op::kPlaceholder:
        break;
      case Op::kParameter: {
        Tensor& g = grads[n.name];
        for (size_t i = 0; i < g.size(); ++i) g.v[i] += dy.v[i];
        break;
      }
      case Op::kGatherRows: {
        if (!needs[static_cast<size_t>(n.inputs[0])]) break;
        Tensor& dx = adjoint(adj, graph, n.inputs[0]);
        for (int t = 0; t < n.rows; ++t) {
          double* dst = dx.data() + static_cast<size_t>(n.indices[t]) * dx.cols;
          const double* src = dy.data() + static_cast<size_t>(t) * n.cols;
          for (int j = 0; j < n.cols; ++j) dst[j] += src[j];
        }
        break;
      }
      case Op::kMatMul: {
        const Tensor& a = vals[static_cast<size_t>(n.inputs[0])];
        const Tensor& b = vals[static_cast<size_t>(n.inputs[1])];
        if (needs[static_cast<size_t>(n.inputs[0])]) {
          Tensor& da = adjoint(adj, graph, n.inputs[0]);
          kern::matmul_nt(dy.data(), b.data(), da.data(), a.rows, b.cols, a.cols);
        }
        if (needs[static_cast<size_t>(n.inputs[1])]) {
          Tensor& db = adjoint(adj, graph, n.inputs[1]);
          kern::matmul_tn(a.data(), dy.data(), db.data(), a.rows, a.cols, b.cols);
        }
        break;
      }
      case Op::kMatMulNT: {
        const Tensor& a = vals[static_cast<size_t>(n.inputs[0])];
        const Tensor& b = vals[static_cast<size_t>(n.inputs[1])];
        if (needs[static_cast<size_t>(n.inputs[0])]) {
          Tensor& da = adjoint(adj, graph, n.inputs[0]);
          kern::matmul_nn(dy.data(), b.data(), da.data(), a.rows, b.rows, a.cols);
        }
        if (needs[static_cast<size_t>(n.inputs[1])]) {
          Tensor& db = adjoint(adj, graph, n.inputs[1]);
          kern::matmul_tn(dy.data(), a.data(), db.data(), a.rows, b.rows, a.cols);
        }
        break;
      }
      case Op::kAdd: {
        for (int side = 0; side < 2; ++side) {
          if (!needs[static_cast<size_t>(n.inputs[side])]) continue;
          Tensor& dx = adjoint(adj, graph, n.inputs[side]);
          for (size_t i = 0; i < dx.size(); ++i) dx.v[i] += dy.v[i];
        }
        break;
      }
      case Op::kAddRowwise: {
        if (needs[static_cast<size_t>(n.inputs[0])]) {
          Tensor& dx = adjoint(adj, graph, n.inputs[0]);
          for (size_t i = 0; i < dx.size(); ++i) dx.v[i] += dy.v[i];
        }
        if (needs[static_cast<size_t>(n.inputs[1])]) {
          Tensor& dr = adjoint(adj, graph, n.inputs[1]);
          for (int i = 0; i < n.rows; ++i) {
            const double* row = dy.data() + static_cast<size_t>(i) * n.cols;
            for (int j = 0; j < n.cols; ++j) dr.v[static_cast<size_t>(j)] += row[j];
          }
        }
        break;
      }
      case Op::kHadamard: {
        const Tensor& a = vals[static_cast<size_t>(n.inputs[0])];
        const Tensor& b = vals[static_cast<size_t>(n.inputs[1])];
        if (needs[static_cast<size_t>(n.inputs[0])]) {
          Tensor& da = adjoint(adj, graph, n.inputs[0]);
          for (size_t i = 0; i < da.size(); ++i) da.v[i] += dy.v[i] * b.v[i];
        }
        if (needs[static_cast<size_t>(n.inputs[1])]) {
          Tensor& db = adjoint(adj, graph, n.inputs[1]);
          for (size_t i = 0; i < db.size(); ++i) db.v[i] += dy.v[i] * a.v[i];
        }
        break;
      }
      case Op::kScale: {
        if (!needs[static_cast<size_t>(n.inputs[0])]) break;
        Tensor& dx = adjoint(adj, graph, n.inputs[0]);
        for (size_t i = 0; i < dx.size(); ++i) dx.v[i] += n.factor * dy.v[i];
        break;
      }
      case Op::kSigmoid: {
        if (!needs[static_cast<size_t>(n.inputs[0])]) break;
        const Tensor& y = vals[static_cast<size_t>(id)];
        Tensor& dx = adjoint(adj, graph, n.inputs[0]);
        for (size_t i = 0; i < dx.size(); ++i) dx.v[i] += dy.v[i] * y.v[i] * (1.0 - y.v[i]);
        break;
      }
      case Op::kTanh: {
        if (!needs[static_cast<size_t>(n.inputs[0])]) break;
        const Tensor& y = vals[static_cast<size_t>(id)];
        Tensor& dx = adjoint(adj, graph, n.inputs[0]);
        for (size_t i = 0; i < dx.size(); ++i) dx.v[i] += dy.v[i] * (1.0 - y.v[i] * y.v[i]);
        break;
      }
      case Op::kLog: {
        if (!needs[static_cast<size_t>(n.inputs[0])]) break;
        const Tensor& x = vals[static_cast<size_t>(n.inputs[0])];
        Tensor& dx = adjoint(adj, graph, n.inputs[0]);
        for (size_t i = 0; i < dx.size(); ++i) dx.v[i] += dy.v[i] / x.v[i];
        break;
      }
      case Op::kSoftmaxRows: {
        if (!needs[static_cast<size_t>(n.inputs[0])]) break;
        const Tensor& y = vals[static_cast<size_t>(id)];
        Tensor& dx = adjoint(adj, graph, n.inputs[0]);
        for (int i = 0; i < n.rows; ++i) {
          const double* yi = y.data() + static_cast<size_t>(i) * n.cols;
          const double* di = dy.data() + static_cast<size_t>(i) * n.cols;
          double* oi = dx.data() + static_cast<size_t>(i) * n.cols;
          double dot = 0.0;
          for (int j = 0; j < n.cols; ++j) dot += di[j] * yi[j];
          for (int j = 0; j < n.cols; ++j) oi[j] += yi[j] * (di[j] - dot);
        }
        break;
      }
      case Op::kNormRows: {
        if (!needs[static_cast<size_t>(n.inputs[0])]) break;
        const Tensor& x = vals[static_cast<size_t>(n.inputs[0])];
        const Tensor& y = vals[static_cast<size_t>(id)];
        Tensor& dx = adjoint(adj, graph, n.inputs[0]);
        for (int i = 0; i < n.rows; ++i) {
          const double* xi = x.data() + static_cast<size_t>(i) * n.cols;
          const double* yi = y.data() + static_cast<size_t>(i) * n.cols;
          const double* di = dy.data() + static_cast<size_t>(i) * n.cols;
          double* oi = dx.data() + static_cast<size_t>(i) * n.cols;
          double mean = 0.0;
          for (int j = 0; j < n.cols; ++j) mean += xi[j];
          mean /= n.cols;
          double var = 0.0;
          for (int j = 0; j < n.cols; ++j) var += (xi[j] - mean) * (xi[j] - mean);
          var /= n.cols;
          const double inv = 1.0 / std::sqrt(var + kNormEpsilon);
          double m1 = 0.0;
          double m2 = 0.0;
          for (int j = 0; j < n.cols; ++j) {
            m1 += di[j];
            m2 += di[j] * yi[j];
          }
          m1 /= n.cols;
          m2 /= n.cols;
          for (int j = 0; j < n.cols; ++j) oi[j] += (di[j] - m1 - yi[j] * m2) * inv;
        }
        break;
      }
      case Op::kMeanRows: {
        if (!needs[static_cast<size_t>(n.inputs[0])]) break;
        const Tensor& x = vals[static_cast<size_t>(n.inputs[0])];
        Tensor& dx = adjoint(adj, graph, n.inputs[0]);
        const double inv = 1.0 / x.rows;
        for (int i = 0; i < x.rows; ++i) {
          double* oi = dx.data() + static_cast<size_t>(i) * n.cols;
          for (int j = 0; j < n.cols; ++j) oi[j] += dy.v[static_cast<size_t>(j)] * inv;
        }
        break;
      }
      case Op::kConcatRows: {
        int off = 0;
        for (int p : n.inputs) {
          const int pr = graph.rows(p);
          if (needs[static_cast<size_t>(p)]) {
            Tensor& dx = adjoint(adj, graph, p);
            for (size_t i = 0; i < dx.size(); ++i) {
              dx.v[i] += dy.v[static_cast<size_t>(off) * n.cols + i];
            }
          }
          off += pr;
        }
        break;
      }
      case Op::kConcatCols: {
        int off = 0;
        for (int p : n.inputs) {
          const int pc = graph.cols(p);
          if (needs[static_cast<size_t>(p)]) {
            Tensor& dx = adjoint(adj, graph, p);
            for (int i = 0; i < n.rows; ++i) {
              for (int j = 0; j < pc; ++j) dx.at(i, j) += dy.at(i, off + j);
            }
          }
          off += pc;
        }
        break;
      }
      case Op::kSliceCols: {
        if (!needs[static_cast<size_t>(n.inputs[0])]) break;
        Tensor& dx = adjoint(adj, graph, n.inputs[0]);
        for (int i = 0; i < n.rows; ++i) {
          for (int j = 0; j < n.cols; ++j) dx.at(i, n.c0 + j) += dy.at(i, j);
        }
        break;
      }
      case Op::kBce: {
        const Tensor& p = vals[static_cast<size_t>(n.inputs[0])];
        const Tensor& y = vals[static_cast<size_t>(n.inputs[1])];
        if (needs[static_cast<size_t>(n.inputs[0])]) {
          Tensor& dp = adjoint(adj, graph, n.inputs[0]);
          for (size_t i = 0; i < dp.size(); ++i) {
            // Where the clamp binds, the loss is flat in p: zero gradient.
            if (p.v[i] <= kProbFloor || p.v[i] >= 1.0 - kProbFloor) continue;
            dp.v[i] += dy.v[i] * (p.v[i] - y.v[i]) / (p.v[i] * (1.0 - p.v[i]));
          }
        }
        if (needs[static_cast<size_t>(n.inputs[1])]) {
          Tensor& dt = adjoint(adj, graph, n.inputs[1]);
          for (size_t i = 0; i < dt.size(); ++i) {
            const double ph = clamp_prob(p.v[i]);
            dt.v[i] += dy.v[i] * (std::log(1.0 - ph) - std::log(ph));
          }
        }
        break;
      }
      case Op::kSum: {
        if (!needs[static_cast<size_t>(n.inputs[0])]) break;
        Tensor& dx = adjoint(adj, graph, n.inputs[0]);
        for (size_t i = 0; i < dx.size(); ++i) dx.v[i] += dy.v[0];
        break;
      }
    }
  }
  return grads;
}

}  // namespace tripex
