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
#include <vector>

#include "tripex/corpus.hpp"
#include "tripex/encoder.hpp"
#include "tripex/tensor.hpp"

namespace tripex {

// A complete tagging model: encoder shape, the relation registry the object
// taggers are indexed by, and every trainable tensor.
struct Model {
  EncoderConfig encoder;
  RelationSet relations;
  ParamStore params;
};

// Encoder plus subject/object tagger shapes, in canonical order.
std::vector<ParamShape> model_param_shapes(const EncoderConfig& config, int relation_count);

// Fresh model with uniform(-0.1, 0.1) parameters drawn in canonical order
// from the seed.
Model init_model(const EncoderConfig& config, const RelationSet& relations, uint64_t seed);

// Persistence: the checkpoint file holds the tensors; a "<path>.meta.json"
// sidecar records the encoder configuration and relation names so a
// checkpoint is self-describing.
void save_model(const std::string& checkpoint_path, const Model& model);
Model load_model(const std::string& checkpoint_path);

// Runs the encoder over token ids.
Tensor encode_sentence(const Model& model, const std::vector<int>& token_ids);

}  // namespace tripex
