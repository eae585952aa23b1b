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

#include <string>
#include <utility>
#include <vector>

#include "tripex/graph.hpp"
#include "tripex/rng.hpp"
#include "tripex/tensor.hpp"

namespace tripex {

enum class EncoderKind { kTransformer, kBilstm };

const char* encoder_kind_name(EncoderKind kind);
EncoderKind parse_encoder_kind(const std::string& name);  // throws ConfigError

// Shape of the sentence encoder. `blocks` counts transformer blocks or
// BiLSTM layers; 0 means the encoder is the embedding alone.
struct EncoderConfig {
  EncoderKind kind = EncoderKind::kTransformer;
  int hidden = 32;     // token vector width d
  int blocks = 2;      // transformer blocks / BiLSTM layers
  int heads = 4;       // attention heads; must divide hidden
  int ffn = 64;        // transformer feed-forward width
  int max_len = 100;   // longest token sequence; also positional table size
  int vocab = 0;       // vocabulary size including pad and unk

  void validate() const;  // throws ConfigError
};

// Every encoder parameter for `config`, as (name, rows, cols), in the fixed
// canonical order used for initialization.
//
// Shared:        enc.tok [vocab x d], enc.pos [max_len x d]
// Transformer:   enc.b{i}.wq/wk/wv/wo [d x d],
//                enc.b{i}.ffn.w1 [d x ffn] b1 [1 x ffn] w2 [ffn x d] b2 [1 x d]
// BiLSTM, per direction f/b and gate g in i,f,o,g:
//                enc.l{i}.{dir}.w{g} [d x d]  input weights
//                enc.l{i}.{dir}.u{g} [d x d]  recurrent weights
//                enc.l{i}.{dir}.b{g} [1 x d]
//                enc.l{i}.proj.w [2d x d], enc.l{i}.proj.b [1 x d]
std::vector<ParamShape> encoder_param_shapes(const EncoderConfig& config);

// Fills `params` with uniform(-0.1, 0.1) draws for every encoder tensor, in
// canonical order, so a given seed always produces the same initialization.
void init_encoder_params(const EncoderConfig& config, Rng& rng, ParamStore& params);

// Graph builders. Each appends nodes to `g` and returns the id of an
// L x hidden result. `append_embed` produces token + position embeddings for
// the given ids; `append_encoder` stacks the configured blocks on top.
// Token ids must be < config.vocab and the sequence no longer than
// config.max_len (callers truncate beforehand); violations throw Error.
int append_embed(ExprGraph& g, const std::vector<int>& tokens, const EncoderConfig& config);
int append_encoder(ExprGraph& g, int h0, const EncoderConfig& config);

// Functional wrappers: build a throwaway graph and evaluate it.
Tensor embed(const std::vector<int>& tokens, const ParamStore& params,
             const EncoderConfig& config);
Tensor encode(const std::vector<int>& tokens, const ParamStore& params,
              const EncoderConfig& config);

}  // namespace tripex
