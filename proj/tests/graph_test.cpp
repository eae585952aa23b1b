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
#include <functional>
#include <string>
#include <vector>

#include "tripex/graph.hpp"
#include "tripex/rng.hpp"
#include "tripex/tensor.hpp"
#include "tripex/util.hpp"

namespace tripex {
namespace {

ParamStore random_params(const std::vector<ParamShape>& shapes, uint64_t seed, double lo = -1.5,
                         double hi = 1.5) {
  Rng rng(seed);
  ParamStore params;
  for (const ParamShape& shape : shapes) {
    Tensor t(shape.rows, shape.cols);
    for (double& x : t.v) {
      x = rng.uniform(lo, hi);
    }
    params.emplace(shape.name, std::move(t));
  }
  return params;
}

double eval_loss(const ExprGraph& g, const ParamStore& params, const Bindings& binds, int loss) {
  return evaluate(g, params, binds).values[loss].at(0, 0);
}

// Central finite differences over every parameter element, compared to the
// analytic gradient with relative error tolerance `rel_tol`.
void check_against_fd(const ExprGraph& g, int loss, const ParamStore& params,
                      const Bindings& binds, double h = 1e-5, double rel_tol = 1e-4) {
  const GradMap grads = gradient(g, params, binds, loss);
  for (const auto& [name, tensor] : params) {
    const Tensor& analytic = grads.at(name);
    REQUIRE(analytic.rows == tensor.rows);
    REQUIRE(analytic.cols == tensor.cols);
    for (size_t i = 0; i < tensor.v.size(); ++i) {
      ParamStore bumped = params;
      bumped.at(name).v[i] = tensor.v[i] + h;
      const double up = eval_loss(g, bumped, binds, loss);
      bumped.at(name).v[i] = tensor.v[i] - h;
      const double down = eval_loss(g, bumped, binds, loss);
      const double fd = (up - down) / (2.0 * h);
      const double scale = std::max({1.0, std::fabs(fd), std::fabs(analytic.v[i])});
      INFO("param ", name, " element ", i, ": fd ", fd, " vs analytic ", analytic.v[i]);
      CHECK(std::fabs(fd - analytic.v[i]) <= rel_tol * scale);
    }
  }
}

}  // namespace

TEST_CASE("forward values of the basic ops") {
  ExprGraph g;
  const int half = g.sigmoid(g.scalar(0.0));
  const int quarter = g.hadamard(half, half);
  const int bce = g.bce(g.scalar(0.9), g.scalar(0.0));
  const EvalResult r = evaluate(g, {}, {});
  CHECK(r.values[half].at(0, 0) == 0.5);
  CHECK(r.values[quarter].at(0, 0) == 0.25);
  // -ln(1 - 0.9), the cross-entropy of predicting 0.9 against target 0.
  CHECK(r.values[bce].at(0, 0) == doctest::Approx(2.302585092994046).epsilon(1e-12));
}

TEST_CASE("sigmoid gradient at zero is exactly one quarter") {
  ExprGraph g;
  const int p = g.parameter("p", 1, 1);
  const int loss = g.sum(g.sigmoid(p));
  ParamStore params;
  params.emplace("p", Tensor(1, 1));
  const GradMap grads = gradient(g, params, {}, loss);
  CHECK(grads.at("p").at(0, 0) == 0.25);
}

TEST_CASE("sigmoid saturates without producing non-finite values") {
  ExprGraph g;
  const int big = g.sigmoid(g.constant(Tensor::row({1000.0, -1000.0})));
  const EvalResult r = evaluate(g, {}, {});
  CHECK(r.values[big].at(0, 0) == 1.0);
  CHECK(r.values[big].at(0, 1) == 0.0);
}

TEST_CASE("softmax rows sum to one and norm rows standardize") {
  ExprGraph g;
  const int x = g.constant(Tensor::row({0.3, -1.7, 2.2, 0.0}));
  const int sm = g.softmax_rows(x);
  const int nm = g.norm_rows(x);
  const EvalResult r = evaluate(g, {}, {});
  double total = 0.0;
  for (int j = 0; j < 4; ++j) {
    total += r.values[sm].at(0, j);
    CHECK(r.values[sm].at(0, j) > 0.0);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  double mean = 0.0;
  double var = 0.0;
  for (int j = 0; j < 4; ++j) {
    mean += r.values[nm].at(0, j);
  }
  mean /= 4.0;
  for (int j = 0; j < 4; ++j) {
    const double d = r.values[nm].at(0, j) - mean;
    var += d * d;
  }
  var /= 4.0;
  CHECK(mean == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(var == doctest::Approx(1.0).epsilon(1e-3));  // off by the epsilon guard
}

TEST_CASE("finite differences confirm every op's gradient") {
  SUBCASE("matmul chain") {
    ExprGraph g;
    const int a = g.parameter("a", 3, 4);
    const int b = g.parameter("b", 4, 2);
    const int loss = g.sum(g.tanh(g.matmul(a, b)));
    check_against_fd(g, loss, random_params({{"a", 3, 4}, {"b", 4, 2}}, 1), {});
  }
  SUBCASE("matmul with transposed right factor") {
    ExprGraph g;
    const int a = g.parameter("a", 3, 4);
    const int b = g.parameter("b", 2, 4);
    const int loss = g.sum(g.sigmoid(g.matmul_nt(a, b)));
    check_against_fd(g, loss, random_params({{"a", 3, 4}, {"b", 2, 4}}, 2), {});
  }
  SUBCASE("add, rowwise add, hadamard, scale") {
    ExprGraph g;
    const int a = g.parameter("a", 3, 4);
    const int b = g.parameter("b", 3, 4);
    const int r = g.parameter("r", 1, 4);
    const int mixed = g.scale(g.hadamard(g.add(a, b), g.add_rowwise(a, r)), 0.7);
    const int loss = g.sum(mixed);
    check_against_fd(g, loss, random_params({{"a", 3, 4}, {"b", 3, 4}, {"r", 1, 4}}, 3), {});
  }
  SUBCASE("sigmoid, tanh, log") {
    ExprGraph g;
    const int a = g.parameter("a", 2, 5);
    const int loss = g.sum(g.log(g.sigmoid(g.tanh(a))));
    check_against_fd(g, loss, random_params({{"a", 2, 5}}, 4), {});
  }
  SUBCASE("softmax rows") {
    ExprGraph g;
    const int a = g.parameter("a", 3, 5);
    const int w = g.parameter("w", 3, 5);
    const int loss = g.sum(g.hadamard(g.softmax_rows(a), w));
    check_against_fd(g, loss, random_params({{"a", 3, 5}, {"w", 3, 5}}, 5), {});
  }
  SUBCASE("row normalization") {
    ExprGraph g;
    const int a = g.parameter("a", 3, 6);
    const int w = g.parameter("w", 3, 6);
    const int loss = g.sum(g.hadamard(g.norm_rows(a), w));
    check_against_fd(g, loss, random_params({{"a", 3, 6}, {"w", 3, 6}}, 6), {});
  }
  SUBCASE("mean of rows") {
    ExprGraph g;
    const int a = g.parameter("a", 4, 3);
    const int loss = g.sum(g.tanh(g.mean_rows(a)));
    check_against_fd(g, loss, random_params({{"a", 4, 3}}, 7), {});
  }
  SUBCASE("gather with repeated rows") {
    ExprGraph g;
    const int a = g.parameter("a", 3, 4);
    const int loss = g.sum(g.sigmoid(g.gather_rows(a, {0, 2, 2, 1, 2})));
    check_against_fd(g, loss, random_params({{"a", 3, 4}}, 8), {});
  }
  SUBCASE("row and column concatenation with slicing") {
    ExprGraph g;
    const int a = g.parameter("a", 2, 3);
    const int b = g.parameter("b", 2, 3);
    const int rows = g.concat_rows({a, b});
    const int cols = g.concat_cols({a, b});
    const int loss = g.add(g.sum(g.tanh(rows)), g.sum(g.sigmoid(g.slice_cols(cols, 2, 5))));
    check_against_fd(g, loss, random_params({{"a", 2, 3}, {"b", 2, 3}}, 9), {});
  }
  SUBCASE("binary cross entropy") {
    ExprGraph g;
    const int a = g.parameter("a", 4, 1);
    const int targets = g.constant(Tensor::column({1.0, 0.0, 1.0, 0.0}));
    const int loss = g.sum(g.bce(g.sigmoid(a), targets));
    check_against_fd(g, loss, random_params({{"a", 4, 1}}, 10), {});
  }
  SUBCASE("affine helper") {
    ExprGraph g;
    const int x = g.parameter("x", 5, 3);
    const int w = g.parameter("w", 3, 2);
    const int b = g.parameter("b", 1, 2);
    const int loss = g.sum(g.sigmoid(g.affine(x, w, b)));
    check_against_fd(g, loss, random_params({{"x", 5, 3}, {"w", 3, 2}, {"b", 1, 2}}, 11), {});
  }
}

TEST_CASE("evaluation is pure") {
  ExprGraph g;
  const int a = g.parameter("a", 3, 3);
  const int loss = g.sum(g.softmax_rows(g.matmul(a, a)));
  const ParamStore params = random_params({{"a", 3, 3}}, 12);
  const EvalResult r1 = evaluate(g, params, {});
  const EvalResult r2 = evaluate(g, params, {});
  REQUIRE(r1.values.size() == r2.values.size());
  for (size_t i = 0; i < r1.values.size(); ++i) {
    CHECK(r1.values[i].v == r2.values[i].v);
  }
  const GradMap g1 = gradient(g, params, {}, loss);
  const GradMap g2 = gradient(g, params, {}, loss);
  for (const auto& [name, tensor] : g1) {
    CHECK(tensor.v == g2.at(name).v);
  }
}

TEST_CASE("doubling the loss doubles every gradient exactly") {
  ExprGraph g;
  const int a = g.parameter("a", 3, 4);
  const int b = g.parameter("b", 4, 2);
  const int base = g.sum(g.sigmoid(g.matmul(a, b)));
  const int doubled = g.scale(base, 2.0);
  const ParamStore params = random_params({{"a", 3, 4}, {"b", 4, 2}}, 13);
  const GradMap g1 = gradient(g, params, {}, base);
  const GradMap g2 = gradient(g, params, {}, doubled);
  for (const auto& [name, tensor] : g1) {
    const Tensor& twice = g2.at(name);
    for (size_t i = 0; i < tensor.v.size(); ++i) {
      CHECK(twice.v[i] == 2.0 * tensor.v[i]);
    }
  }
}

TEST_CASE("parameters not reached by the loss get zero gradients") {
  ExprGraph g;
  const int used = g.parameter("used", 2, 2);
  g.parameter("unused", 2, 2);
  const int loss = g.sum(used);
  const ParamStore params = random_params({{"used", 2, 2}, {"unused", 2, 2}}, 14);
  const GradMap grads = gradient(g, params, {}, loss);
  REQUIRE(grads.count("unused") == 1);
  for (double x : grads.at("unused").v) {
    CHECK(x == 0.0);
  }
  for (double x : grads.at("used").v) {
    CHECK(x == 1.0);
  }
}

TEST_CASE("placeholders demand bindings of the declared shape") {
  ExprGraph g;
  const int x = g.placeholder("x", 2, 3);
  const int loss = g.sum(x);
  Bindings binds;
  CHECK_THROWS_AS(evaluate(g, {}, binds), Error);
  binds.emplace("x", Tensor(3, 2));
  CHECK_THROWS_AS(evaluate(g, {}, binds), Error);
  binds.clear();
  binds.emplace("x", Tensor(2, 3));
  CHECK(eval_loss(g, {}, binds, loss) == 0.0);
}

TEST_CASE("parameter nodes demand store entries") {
  ExprGraph g;
  const int p = g.parameter("p", 2, 2);
  const int loss = g.sum(p);
  CHECK_THROWS_AS(evaluate(g, {}, {}), Error);
  ParamStore wrong;
  wrong.emplace("p", Tensor(1, 2));
  CHECK_THROWS_AS(evaluate(g, wrong, {}), Error);
  ParamStore right;
  right.emplace("p", Tensor(2, 2));
  CHECK(eval_loss(g, right, {}, loss) == 0.0);
}

TEST_CASE("builders reject mismatched shapes") {
  ExprGraph g;
  const int a = g.constant(Tensor(2, 3));
  const int b = g.constant(Tensor(2, 2));
  CHECK_THROWS_AS(g.matmul(a, b), Error);
  CHECK_THROWS_AS(g.add(a, b), Error);
  CHECK_THROWS_AS(g.hadamard(a, b), Error);
  CHECK_THROWS_AS(g.concat_cols(std::vector<int>{}), Error);
  CHECK_THROWS_AS(g.slice_cols(a, 2, 2), Error);
  CHECK_THROWS_AS(g.gather_rows(a, {0, 5}), Error);
  const int not_scalar = g.constant(Tensor(2, 2));
  CHECK_THROWS_AS(gradient(g, {}, {}, not_scalar), Error);
}

TEST_CASE("redeclaring a parameter with another shape is an error") {
  ExprGraph g;
  const int first = g.parameter("p", 2, 2);
  const int again = g.parameter("p", 2, 2);
  CHECK(first == again);  // same name and shape folds to one node
  CHECK_THROWS_AS(g.parameter("p", 3, 2), Error);
}

}  // namespace tripex
