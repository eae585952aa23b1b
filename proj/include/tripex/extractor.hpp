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
#include "tripex/model.hpp"
#include "tripex/tagger.hpp"

namespace tripex {

// One decoded triple, with the spans it came from and the index of the
// tagged subject that produced it.
struct ExtractedTriple {
  Span subject_span;
  Span object_span;
  std::string subject;
  std::string object;
  int relation_id = -1;
  std::string relation;
  int subject_index = -1;

  Triple triple() const { return Triple{subject, relation, object}; }
};

// How much work decoding did: the number of tagged subjects and the number
// of per-relation object passes (subjects x relations).
struct ExtractionCounts {
  int subjects = 0;
  int object_passes = 0;
};

// Decodes a sentence: tag subjects once, then run every relation's object
// tagger once per subject. Duplicate (subject, relation, object) string
// triples keep their first occurrence. An empty token list yields an empty
// result without touching the model.
std::vector<ExtractedTriple> extract_triples(const std::vector<std::string>& tokens,
                                             const std::vector<int>& token_ids,
                                             const Model& model, double threshold,
                                             ExtractionCounts* counts = nullptr);

// Per-sentence decoding over a whole corpus, parallel across sentences.
// Results line up with corpus.sentences.
std::vector<std::vector<ExtractedTriple>> extract_corpus(const Corpus& corpus, const Vocab& vocab,
                                                         const Model& model, double threshold);

std::vector<Triple> to_triples(const std::vector<ExtractedTriple>& extracted);

// Writes predictions in the corpus JSONL shape, one record per sentence.
void save_predictions(const std::string& path, const Corpus& corpus,
                      const std::vector<std::vector<ExtractedTriple>>& predictions);

}  // namespace tripex
