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

#include "tripex/extractor.hpp"

#include <set>
#include <tuple>

#include <json.hpp>

#include "tripex/kernels.hpp"
#include "tripex/util.hpp"

namespace tripex {

std::vector<ExtractedTriple> extract_triples(const std::vector<std::string>& tokens,
                                             const std::vector<int>& token_ids,
                                             const Model& model, double threshold,
                                             ExtractionCounts* counts) {
  if (tokens.size() != token_ids.size()) {
    throw Error("extract_triples: " + std::to_string(tokens.size()) + " tokens but " +
                std::to_string(token_ids.size()) + " token ids");
  }
  std::vector<ExtractedTriple> out;
  if (counts != nullptr) {
    *counts = ExtractionCounts{};
  }
  if (tokens.empty()) {
    return out;
  }

  const Tensor h = encode_sentence(model, token_ids);
  const TagField subject_field = tag_subject(h, model.params, threshold);
  const std::vector<Span> subjects = match_spans(subject_field.start_tags, subject_field.end_tags);
  if (counts != nullptr) {
    counts->subjects = static_cast<int>(subjects.size());
  }

  std::set<std::tuple<std::string, int, std::string>> seen;
  for (int si = 0; si < static_cast<int>(subjects.size()); ++si) {
    const Span& subject = subjects[si];
    const Tensor v_sub = subject_vector(h, subject);
    const std::string subject_text = join_tokens(tokens, subject.start, subject.end);
    for (int r = 0; r < model.relations.size(); ++r) {
      if (counts != nullptr) {
        ++counts->object_passes;
      }
      const TagField object_field =
          tag_object(h, v_sub, r, model.relations.size(), model.params, threshold);
      for (const Span& object : match_spans(object_field.start_tags, object_field.end_tags)) {
        ExtractedTriple t;
        t.subject_span = subject;
        t.object_span = object;
        t.subject = subject_text;
        t.object = join_tokens(tokens, object.start, object.end);
        t.relation_id = r;
        t.relation = model.relations.names[r];
        t.subject_index = si;
        if (seen.emplace(t.subject, t.relation_id, t.object).second) {
          out.push_back(std::move(t));
        }
      }
    }
  }
  return out;
}

std::vector<std::vector<ExtractedTriple>> extract_corpus(const Corpus& corpus, const Vocab& vocab,
                                                         const Model& model, double threshold) {
  const int n = static_cast<int>(corpus.sentences.size());
  std::vector<std::vector<ExtractedTriple>> out(n);
  std::vector<std::vector<int>> ids(n);
  for (int i = 0; i < n; ++i) {
    ids[i] = vocab.encode(corpus.sentences[i].tokens);
  }
#pragma omp parallel for schedule(dynamic) if (kern::parallel_enabled() && n > 1)
  for (int i = 0; i < n; ++i) {
    out[i] = extract_triples(corpus.sentences[i].tokens, ids[i], model, threshold);
  }
  return out;
}

std::vector<Triple> to_triples(const std::vector<ExtractedTriple>& extracted) {
  std::vector<Triple> out;
  out.reserve(extracted.size());
  for (const ExtractedTriple& t : extracted) {
    out.push_back(t.triple());
  }
  return out;
}

void save_predictions(const std::string& path, const Corpus& corpus,
                      const std::vector<std::vector<ExtractedTriple>>& predictions) {
  if (corpus.sentences.size() != predictions.size()) {
    throw Error("save_predictions: " + std::to_string(corpus.sentences.size()) +
                " sentences but " + std::to_string(predictions.size()) + " prediction lists");
  }
  std::string out;
  for (size_t i = 0; i < predictions.size(); ++i) {
    nlohmann::json record;
    record["text"] = corpus.sentences[i].text;
    nlohmann::json list = nlohmann::json::array();
    for (const ExtractedTriple& t : predictions[i]) {
      list.push_back({t.subject, t.relation, t.object});
    }
    record["triple_list"] = std::move(list);
    out += record.dump();
    out += '\n';
  }
  atomic_write_file(path, out);
}

}  // namespace tripex
