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

#include "tripex/tagger.hpp"

#include <algorithm>
#include <cmath>

#include "tripex/util.hpp"

namespace tripex {

namespace {

std::string obj_prefix(int relation) { return "obj.r" + std::to_string(relation); }

std::pair<int, int> append_probe(ExprGraph& g, int x, int hidden, const std::string& prefix) {
  const int ws = g.parameter(prefix + ".ws", hidden, 1);
  const int bs = g.parameter(prefix + ".bs", 1, 1);
  const int we = g.parameter(prefix + ".we", hidden, 1);
  const int be = g.parameter(prefix + ".be", 1, 1);
  return {g.sigmoid(g.affine(x, ws, bs)), g.sigmoid(g.affine(x, we, be))};
}

}  // namespace

std::vector<ParamShape> tagger_param_shapes(int hidden, int relation_count) {
  std::vector<ParamShape> shapes;
  auto probe = [&](const std::string& prefix) {
    shapes.push_back({prefix + ".ws", hidden, 1});
    shapes.push_back({prefix + ".bs", 1, 1});
    shapes.push_back({prefix + ".we", hidden, 1});
    shapes.push_back({prefix + ".be", 1, 1});
  };
  probe("subj");
  for (int r = 0; r < relation_count; ++r) probe(obj_prefix(r));
  return shapes;
}

std::pair<int, int> append_subject_probs(ExprGraph& g, int h, int hidden) {
  return append_probe(g, h, hidden, "subj");
}

std::pair<int, int> append_object_probs(ExprGraph& g, int h, int v_sub, int relation,
                                        int hidden) {
  return append_probe(g, g.add_rowwise(h, v_sub), hidden, obj_prefix(relation));
}

std::vector<int> binarize(const std::vector<double>& probs, double threshold) {
  std::vector<int> tags(probs.size());
  for (size_t i = 0; i < probs.size(); ++i) tags[i] = probs[i] > threshold ? 1 : 0;
  return tags;
}

std::vector<Span> match_spans(const std::vector<int>& start_tags,
                              const std::vector<int>& end_tags) {
  const int len = static_cast<int>(start_tags.size());
  std::vector<Span> spans;
  for (int i = 0; i < len; ++i) {
    if (start_tags[static_cast<size_t>(i)] == 0) continue;
    for (int j = i; j < len; ++j) {
      if (end_tags[static_cast<size_t>(j)] != 0) {
        spans.push_back({i, j});
        break;
      }
    }
  }
  return spans;
}

Tensor subject_vector(const Tensor& h, const Span& span) {
  if (span.start < 0 || span.end < span.start || span.end >= h.rows) {
    throw Error("subject_vector: span [" + std::to_string(span.start) + ", " +
                std::to_string(span.end) + "] outside " + std::to_string(h.rows) + " rows");
  }
  Tensor v(1, h.cols);
  for (int i = span.start; i <= span.end; ++i) {
    for (int j = 0; j < h.cols; ++j) v.v[static_cast<size_t>(j)] += h.at(i, j);
  }
  const double inv = 1.0 / (span.end - span.start + 1);
  for (int j = 0; j < h.cols; ++j) v.v[static_cast<size_t>(j)] *= inv;
  return v;
}

namespace {

TagField field_from_probs(const Tensor& start, const Tensor& end, double threshold) {
  TagField f;
  f.start_probs = start.v;
  f.end_probs = end.v;
  f.start_tags = binarize(f.start_probs, threshold);
  f.end_tags = binarize(f.end_probs, threshold);
  return f;
}

}  // namespace

TagField tag_subject(const Tensor& h, const ParamStore& params, double threshold) {
  ExprGraph g;
  const int hid = g.placeholder("h", h.rows, h.cols);
  const auto [ps, pe] = append_subject_probs(g, hid, h.cols);
  EvalResult r = evaluate(g, params, {{"h", h}});
  return field_from_probs(r.values[static_cast<size_t>(ps)], r.values[static_cast<size_t>(pe)],
                          threshold);
}

TagField tag_object(const Tensor& h, const Tensor& v_sub, int relation, int relation_count,
                    const ParamStore& params, double threshold) {
  if (relation < 0 || relation >= relation_count) {
    throw Error("tag_object: unknown relation id " + std::to_string(relation) + " (have " +
                std::to_string(relation_count) + " relations)");
  }
  if (v_sub.rows != 1 || v_sub.cols != h.cols) {
    throw Error("tag_object: subject vector must be 1 x " + std::to_string(h.cols));
  }
  ExprGraph g;
  const int hid = g.placeholder("h", h.rows, h.cols);
  const int vid = g.placeholder("v", 1, h.cols);
  const auto [ps, pe] = append_object_probs(g, hid, vid, relation, h.cols);
  EvalResult r = evaluate(g, params, {{"h", h}, {"v", v_sub}});
  return field_from_probs(r.values[static_cast<size_t>(ps)], r.values[static_cast<size_t>(pe)],
                          threshold);
}

GoldTags build_gold_tags(int length, const Span& subject_span,
                         const std::vector<std::pair<int, Span>>& relation_objects,
                         int relation_count) {
  auto check_span = [length](const Span& s, const char* what) {
    if (s.start < 0 || s.end < s.start || s.end >= length) {
      throw Error(std::string("build_gold_tags: ") + what + " span [" +
                  std::to_string(s.start) + ", " + std::to_string(s.end) + "] outside " +
                  std::to_string(length) + " tokens");
    }
  };
  check_span(subject_span, "subject");
  GoldTags gold;
  gold.subject.start.assign(static_cast<size_t>(length), 0.0);
  gold.subject.end.assign(static_cast<size_t>(length), 0.0);
  gold.subject.start[static_cast<size_t>(subject_span.start)] = 1.0;
  gold.subject.end[static_cast<size_t>(subject_span.end)] = 1.0;
  gold.objects.resize(static_cast<size_t>(relation_count));
  for (GoldField& f : gold.objects) {
    f.start.assign(static_cast<size_t>(length), 0.0);
    f.end.assign(static_cast<size_t>(length), 0.0);
  }
  for (const auto& [relation, span] : relation_objects) {
    if (relation < 0 || relation >= relation_count) {
      throw Error("build_gold_tags: relation id " + std::to_string(relation) + " outside " +
                  std::to_string(relation_count) + " relations");
    }
    check_span(span, "object");
    GoldField& f = gold.objects[static_cast<size_t>(relation)];
    f.start[static_cast<size_t>(span.start)] = 1.0;
    f.end[static_cast<size_t>(span.end)] = 1.0;
  }
  return gold;
}

double span_log_likelihood(const TagField& probs, const GoldField& gold) {
  if (probs.start_probs.size() != gold.start.size() ||
      probs.end_probs.size() != gold.end.size()) {
    throw Error("span_log_likelihood: length mismatch");
  }
  auto half = [](const std::vector<double>& p, const std::vector<double>& y) {
    double total = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
      double ph = p[i];
      if (ph < kProbFloor) ph = kProbFloor;
      if (ph > 1.0 - kProbFloor) ph = 1.0 - kProbFloor;
      total += y[i] * std::log(ph) + (1.0 - y[i]) * std::log(1.0 - ph);
    }
    return total;
  };
  return half(probs.start_probs, gold.start) + half(probs.end_probs, gold.end);
}

}  // namespace tripex
