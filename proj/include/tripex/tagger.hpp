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

#include <utility>
#include <vector>

#include "tripex/graph.hpp"
#include "tripex/tensor.hpp"

namespace tripex {

// Inclusive token span [start, end].
struct Span {
  int start = 0;
  int end = 0;
  bool operator==(const Span& o) const { return start == o.start && end == o.end; }
  bool operator<(const Span& o) const {
    return start != o.start ? start < o.start : end < o.end;
  }
};

// Per-token start/end probabilities and their thresholded 0/1 tags.
struct TagField {
  std::vector<double> start_probs;
  std::vector<double> end_probs;
  std::vector<int> start_tags;
  std::vector<int> end_tags;
};

// A gold 0/1 start/end marking, stored as doubles so it can feed the BCE
// loss directly.
struct GoldField {
  std::vector<double> start;
  std::vector<double> end;
};

// Gold supervision for one subject: the subject's own span marking plus one
// object field per relation. Relations the subject does not lead keep the
// all-zero field (the tagger is trained to predict nothing for them).
struct GoldTags {
  GoldField subject;
  std::vector<GoldField> objects;  // indexed by relation id
};

// Tagger parameters, all width-d probes with scalar biases:
//   subj.ws [d x 1]  subj.bs [1 x 1]  subj.we [d x 1]  subj.be [1 x 1]
//   obj.r{r}.ws / .bs / .we / .be  for each relation id r
std::vector<ParamShape> tagger_param_shapes(int hidden, int relation_count);

// Graph builders: probability columns over an L x d input. Each returns the
// (start, end) node ids of L x 1 sigmoid outputs.
std::pair<int, int> append_subject_probs(ExprGraph& g, int h, int hidden);
// Adds v_sub (a 1 x d node) to every row of h before probing with relation
// r's weights.
std::pair<int, int> append_object_probs(ExprGraph& g, int h, int v_sub, int relation, int hidden);

// tag_i = 1 iff p_i > threshold, strictly.
std::vector<int> binarize(const std::vector<double>& probs, double threshold);

// Pairs each start position (ascending) with the nearest end position at an
// equal or later index. Ends may serve several starts; a start with no end
// at or after it yields no span. Output is ordered by start.
std::vector<Span> match_spans(const std::vector<int>& start_tags,
                              const std::vector<int>& end_tags);

// Arithmetic mean of rows span.start .. span.end of h. Throws Error when
// the span leaves [0, rows).
Tensor subject_vector(const Tensor& h, const Span& span);

// Pure tagging over an encoded sentence: evaluate the probability graph and
// binarize. tag_object throws Error for a relation id outside
// [0, relation_count) or a v_sub width mismatch.
TagField tag_subject(const Tensor& h, const ParamStore& params, double threshold);
TagField tag_object(const Tensor& h, const Tensor& v_sub, int relation, int relation_count,
                    const ParamStore& params, double threshold);

// Gold tags for one subject. `relation_objects` lists (relation id, object
// span) pairs the subject leads; several objects may share a relation.
// Throws Error on spans or ids out of range.
GoldTags build_gold_tags(int length, const Span& subject_span,
                         const std::vector<std::pair<int, Span>>& relation_objects,
                         int relation_count);

// Log-likelihood of gold tags under the field's probabilities:
// sum over start/end and positions of y*ln(p) + (1-y)*ln(1-p), with p
// clamped the same way the BCE graph op clamps. Always <= 0.
double span_log_likelihood(const TagField& probs, const GoldField& gold);

}  // namespace tripex
