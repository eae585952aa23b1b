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

#include "tripex/encoder.hpp"

#include <cmath>

#include "tripex/util.hpp"

namespace tripex {

const char* encoder_kind_name(EncoderKind kind) {
  return kind == EncoderKind::kTransformer ? "transformer" : "bilstm";
}

EncoderKind parse_encoder_kind(const std::string& name) {
  if (name == "transformer") return EncoderKind::kTransformer;
  if (name == "bilstm") return EncoderKind::kBilstm;
  throw ConfigError("unknown encoder kind '" + name + "' (expected transformer or bilstm)");
}

void EncoderConfig::validate() const {
  if (hidden < 1) throw ConfigError("encoder hidden size must be >= 1");
  if (blocks < 0) throw ConfigError("encoder block count must be >= 0");
  if (max_len < 1) throw ConfigError("encoder max length must be >= 1");
  if (vocab < 2) throw ConfigError("vocabulary must hold at least pad and unk");
  if (kind == EncoderKind::kTransformer) {
    if (heads < 1) throw ConfigError("head count must be >= 1");
    if (hidden % heads != 0) {
      throw ConfigError("head count " + std::to_string(heads) + " must divide hidden size " +
                        std::to_string(hidden));
    }
    if (ffn < 1) throw ConfigError("feed-forward width must be >= 1");
  }
}

namespace {

std::string block_prefix(const EncoderConfig& config, int i) {
  return (config.kind == EncoderKind::kTransformer ? "enc.b" : "enc.l") + std::to_string(i);
}

constexpr char kGates[] = {'i', 'f', 'o', 'g'};
constexpr char kDirections[] = {'f', 'b'};

}  // namespace

std::vector<ParamShape> encoder_param_shapes(const EncoderConfig& config) {
  config.validate();
  const int d = config.hidden;
  std::vector<ParamShape> shapes;
  shapes.push_back({"enc.tok", config.vocab, d});
  shapes.push_back({"enc.pos", config.max_len, d});
  for (int i = 0; i < config.blocks; ++i) {
    const std::string p = block_prefix(config, i);
    if (config.kind == EncoderKind::kTransformer) {
      for (const char* w : {".wq", ".wk", ".wv", ".wo"}) shapes.push_back({p + w, d, d});
      shapes.push_back({p + ".ffn.w1", d, config.ffn});
      shapes.push_back({p + ".ffn.b1", 1, config.ffn});
      shapes.push_back({p + ".ffn.w2", config.ffn, d});
      shapes.push_back({p + ".ffn.b2", 1, d});
    } else {
      for (char dir : kDirections) {
        const std::string q = p + "." + dir + ".";
        for (char gate : kGates) shapes.push_back({q + "w" + gate, d, d});
        for (char gate : kGates) shapes.push_back({q + "u" + gate, d, d});
        for (char gate : kGates) shapes.push_back({q + "b" + gate, 1, d});
      }
      shapes.push_back({p + ".proj.w", 2 * d, d});
      shapes.push_back({p + ".proj.b", 1, d});
    }
  }
  return shapes;
}

void init_encoder_params(const EncoderConfig& config, Rng& rng, ParamStore& params) {
  for (const ParamShape& s : encoder_param_shapes(config)) {
    Tensor t(s.rows, s.cols);
    for (size_t i = 0; i < t.size(); ++i) t.v[i] = rng.uniform(-0.1, 0.1);
    params[s.name] = std::move(t);
  }
}

int append_embed(ExprGraph& g, const std::vector<int>& tokens, const EncoderConfig& config) {
  config.validate();
  if (tokens.empty()) throw Error("encoder: empty token sequence");
  if (static_cast<int>(tokens.size()) > config.max_len) {
    throw Error("encoder: sequence of " + std::to_string(tokens.size()) +
                " tokens exceeds max length " + std::to_string(config.max_len));
  }
  std::vector<int> positions(tokens.size());
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] < 0 || tokens[i] >= config.vocab) {
      throw Error("encoder: token id " + std::to_string(tokens[i]) +
                  " outside vocabulary of " + std::to_string(config.vocab));
    }
    positions[i] = static_cast<int>(i);
  }
  const int tok = g.parameter("enc.tok", config.vocab, config.hidden);
  const int pos = g.parameter("enc.pos", config.max_len, config.hidden);
  return g.add(g.gather_rows(tok, tokens), g.gather_rows(pos, positions));
}

namespace {

int append_transformer_block(ExprGraph& g, int h, const EncoderConfig& config,
                             const std::string& p) {
  const int d = config.hidden;
  const int dk = d / config.heads;
  const int wq = g.parameter(p + ".wq", d, d);
  const int wk = g.parameter(p + ".wk", d, d);
  const int wv = g.parameter(p + ".wv", d, d);
  const int wo = g.parameter(p + ".wo", d, d);

  // Pre-norm multi-head self-attention with a residual connection.
  const int a = g.norm_rows(h);
  const int q = g.matmul(a, wq);
  const int k = g.matmul(a, wk);
  const int v = g.matmul(a, wv);
  std::vector<int> contexts;
  for (int head = 0; head < config.heads; ++head) {
    const int c0 = head * dk;
    const int c1 = c0 + dk;
    const int scores = g.scale(g.matmul_nt(g.slice_cols(q, c0, c1), g.slice_cols(k, c0, c1)),
                               1.0 / std::sqrt(static_cast<double>(dk)));
    contexts.push_back(g.matmul(g.softmax_rows(scores), g.slice_cols(v, c0, c1)));
  }
  h = g.add(h, g.matmul(g.concat_cols(contexts), wo));

  // Pre-norm two-layer feed-forward with a residual connection.
  const int w1 = g.parameter(p + ".ffn.w1", d, config.ffn);
  const int b1 = g.parameter(p + ".ffn.b1", 1, config.ffn);
  const int w2 = g.parameter(p + ".ffn.w2", config.ffn, d);
  const int b2 = g.parameter(p + ".ffn.b2", 1, d);
  return g.add(h, g.affine(g.tanh(g.affine(g.norm_rows(h), w1, b1)), w2, b2));
}

int append_bilstm_layer(ExprGraph& g, int x, const EncoderConfig& config, const std::string& p) {
  const int d = config.hidden;
  const int len = g.rows(x);

  // One recurrent direction; `order` lists time steps first to last.
  auto run_direction = [&](char dir, const std::vector<int>& order) {
    const std::string q = p + "." + dir + ".";
    int w[4];
    int u[4];
    int b[4];
    for (int i = 0; i < 4; ++i) {
      w[i] = g.parameter(q + "w" + kGates[i], d, d);
      u[i] = g.parameter(q + "u" + kGates[i], d, d);
      b[i] = g.parameter(q + "b" + kGates[i], 1, d);
    }
    int h = g.constant(Tensor(1, d));
    int c = g.constant(Tensor(1, d));
    std::vector<int> states(order.size());
    for (int t : order) {
      const int xt = g.gather_rows(x, {t});
      auto gate = [&](int i) { return g.add(g.affine(xt, w[i], b[i]), g.matmul(h, u[i])); };
      const int ig = g.sigmoid(gate(0));
      const int fg = g.sigmoid(gate(1));
      const int og = g.sigmoid(gate(2));
      const int gg = g.tanh(gate(3));
      c = g.add(g.hadamard(fg, c), g.hadamard(ig, gg));
      h = g.hadamard(og, g.tanh(c));
      states[static_cast<size_t>(t)] = h;  // stacked back in token order
    }
    return g.concat_rows(states);
  };

  std::vector<int> forward_order(static_cast<size_t>(len));
  std::vector<int> backward_order(static_cast<size_t>(len));
  for (int t = 0; t < len; ++t) {
    forward_order[static_cast<size_t>(t)] = t;
    backward_order[static_cast<size_t>(t)] = len - 1 - t;
  }
  const int both = g.concat_cols({run_direction('f', forward_order),
                                  run_direction('b', backward_order)});
  return g.affine(both, g.parameter(p + ".proj.w", 2 * d, d), g.parameter(p + ".proj.b", 1, d));
}

}  // namespace

int append_encoder(ExprGraph& g, int h0, const EncoderConfig& config) {
  config.validate();
  if (g.cols(h0) != config.hidden) {
    throw Error("encoder: input width " + std::to_string(g.cols(h0)) + " does not match hidden " +
                std::to_string(config.hidden));
  }
  int h = h0;
  for (int i = 0; i < config.blocks; ++i) {
    const std::string p = block_prefix(config, i);
    h = config.kind == EncoderKind::kTransformer ? append_transformer_block(g, h, config, p)
                                                 : append_bilstm_layer(g, h, config, p);
  }
  return h;
}

Tensor embed(const std::vector<int>& tokens, const ParamStore& params,
             const EncoderConfig& config) {
  ExprGraph g;
  const int out = append_embed(g, tokens, config);
  return evaluate(g, params, {}).values[static_cast<size_t>(out)];
}

Tensor encode(const std::vector<int>& tokens, const ParamStore& params,
              const EncoderConfig& config) {
  ExprGraph g;
  const int out = append_encoder(g, append_embed(g, tokens, config), config);
  return evaluate(g, params, {}).values[static_cast<size_t>(out)];
}

}  // namespace tripex
