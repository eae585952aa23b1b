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

#include "tripex/model.hpp"

#include <json.hpp>

#include "tripex/checkpoint.hpp"
#include "tripex/rng.hpp"
#include "tripex/tagger.hpp"
#include "tripex/util.hpp"

namespace tripex {

std::vector<ParamShape> model_param_shapes(const EncoderConfig& config, int relation_count) {
  std::vector<ParamShape> shapes = encoder_param_shapes(config);
  std::vector<ParamShape> tagger = tagger_param_shapes(config.hidden, relation_count);
  shapes.insert(shapes.end(), tagger.begin(), tagger.end());
  return shapes;
}

Model init_model(const EncoderConfig& config, const RelationSet& relations, uint64_t seed) {
  config.validate();
  if (relations.size() == 0) {
    throw Error("cannot initialize a model with zero relations");
  }
  Model model;
  model.encoder = config;
  model.relations = relations;
  Rng rng(seed);
  for (const ParamShape& shape : model_param_shapes(config, relations.size())) {
    Tensor t(shape.rows, shape.cols);
    for (double& x : t.v) {
      x = rng.uniform(-0.1, 0.1);
    }
    model.params.emplace(shape.name, std::move(t));
  }
  return model;
}

namespace {

std::string meta_path_for(const std::string& checkpoint_path) {
  return checkpoint_path + ".meta.json";
}

}  // namespace

void save_model(const std::string& checkpoint_path, const Model& model) {
  save_params(checkpoint_path, model.params);
  nlohmann::json meta;
  meta["encoder"] = {
      {"kind", encoder_kind_name(model.encoder.kind)},
      {"hidden", model.encoder.hidden},
      {"blocks", model.encoder.blocks},
      {"heads", model.encoder.heads},
      {"ffn", model.encoder.ffn},
      {"max_len", model.encoder.max_len},
      {"vocab", model.encoder.vocab},
  };
  meta["relations"] = model.relations.names;
  atomic_write_file(meta_path_for(checkpoint_path), meta.dump(2) + "\n");
}

Model load_model(const std::string& checkpoint_path) {
  const std::string meta_file = meta_path_for(checkpoint_path);
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(read_file(meta_file));
  } catch (const nlohmann::json::exception& e) {
    throw Error(meta_file + ": " + e.what());
  }
  if (!meta.is_object() || !meta.contains("encoder") || !meta.contains("relations")) {
    throw Error(meta_file + ": expected an object with \"encoder\" and \"relations\"");
  }
  Model model;
  try {
    const nlohmann::json& enc = meta.at("encoder");
    model.encoder.kind = parse_encoder_kind(enc.at("kind").get<std::string>());
    model.encoder.hidden = enc.at("hidden").get<int>();
    model.encoder.blocks = enc.at("blocks").get<int>();
    model.encoder.heads = enc.at("heads").get<int>();
    model.encoder.ffn = enc.at("ffn").get<int>();
    model.encoder.max_len = enc.at("max_len").get<int>();
    model.encoder.vocab = enc.at("vocab").get<int>();
    for (const nlohmann::json& name : meta.at("relations")) {
      model.relations.add(name.get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(meta_file + ": " + e.what());
  }
  model.encoder.validate();
  if (model.relations.size() == 0) {
    throw Error(meta_file + ": relation list is empty");
  }
  model.params = load_params(checkpoint_path);
  // Cross-check the stored tensors against what the configuration implies so
  // a mismatched sidecar fails here rather than deep inside a graph build.
  std::vector<ParamShape> expected = model_param_shapes(model.encoder, model.relations.size());
  if (expected.size() != model.params.size()) {
    throw Error(checkpoint_path + ": expected " + std::to_string(expected.size()) +
                " tensors for this configuration, found " + std::to_string(model.params.size()));
  }
  for (const ParamShape& shape : expected) {
    auto it = model.params.find(shape.name);
    if (it == model.params.end()) {
      throw Error(checkpoint_path + ": missing tensor \"" + shape.name + "\"");
    }
    if (it->second.rows != shape.rows || it->second.cols != shape.cols) {
      throw Error(checkpoint_path + ": tensor \"" + shape.name + "\" has shape " +
                  std::to_string(it->second.rows) + "x" + std::to_string(it->second.cols) +
                  ", expected " + std::to_string(shape.rows) + "x" + std::to_string(shape.cols));
    }
  }
  return model;
}

Tensor encode_sentence(const Model& model, const std::vector<int>& token_ids) {
  return encode(token_ids, model.params, model.encoder);
}

}  // namespace tripex
