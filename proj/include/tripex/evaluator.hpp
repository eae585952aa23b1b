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

#include <array>
#include <string>
#include <vector>

#include "tripex/corpus.hpp"

namespace tripex {

// How two triples are compared. Partial credits a triple when the relation
// and the first whitespace token of both entities agree; Exact requires the
// full entity strings.
enum class MatchMode { kPartial, kExact };

const char* match_mode_name(MatchMode mode);
MatchMode parse_match_mode(const std::string& name);  // throws ConfigError

// First whitespace-delimited token of a string, or "" if it has none.
std::string first_token(const std::string& text);

bool triple_match(const Triple& pred, const Triple& gold, MatchMode mode);

// Which fields of a triple take part in a comparison. E1 is the subject,
// E2 the object, R the relation.
enum class ElementPattern { kE1, kE2, kR, kE1R, kRE2, kE1E2, kE1RE2 };

inline constexpr std::array<ElementPattern, 7> kElementPatterns = {
    ElementPattern::kE1,   ElementPattern::kE2,   ElementPattern::kR,    ElementPattern::kE1R,
    ElementPattern::kRE2,  ElementPattern::kE1E2, ElementPattern::kE1RE2};

const char* element_pattern_name(ElementPattern pattern);

// Comparison key of a triple restricted to a pattern. Entities go through
// the mode's projection (first token for Partial); relations are always
// compared verbatim.
std::string element_key(const Triple& triple, ElementPattern pattern, MatchMode mode);

struct MicroCounts {
  long tp = 0;
  long fp = 0;
  long fn = 0;

  MicroCounts& operator+=(const MicroCounts& other) {
    tp += other.tp;
    fp += other.fp;
    fn += other.fn;
    return *this;
  }
};

struct Score {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Micro precision/recall/F1 with 0/0 defined as 0.
Score score_from_counts(const MicroCounts& counts);

// One-to-one matching within a sentence: predictions are taken in order and
// each consumes the first not-yet-matched gold triple it matches.
MicroCounts match_sentence(const std::vector<Triple>& pred, const std::vector<Triple>& gold,
                           MatchMode mode);

// Corpus-level micro score; the two outer lists must line up.
Score score_micro(const std::vector<std::vector<Triple>>& preds,
                  const std::vector<std::vector<Triple>>& golds, MatchMode mode);

// One row of a report: a label, how many sentences contributed, and the
// pooled counts. `present` is false for an empty subset (no sentences),
// which renders as "-" instead of misleading zeros.
struct GroupReport {
  std::string label;
  long sentences = 0;
  MicroCounts counts;
  Score score;
  bool present = false;
};

struct EvalReport {
  MatchMode mode = MatchMode::kPartial;
  long sentences = 0;
  MicroCounts overall_counts;
  Score overall;
  std::vector<GroupReport> by_overlap;  // Normal / EPO / SEO (subsets may overlap)
  std::vector<GroupReport> by_count;    // N=1 .. N>=5 by gold triple count
  std::vector<GroupReport> by_element;  // the seven element patterns, all sentences
};

// Scores predictions against a gold corpus: overall micro score, overlap-
// category and triple-count breakdowns over sentence subsets, and the
// element analysis, which rescores all sentences under each pattern by
// matching projected triples one-to-one.
EvalReport evaluate_predictions(const std::vector<std::vector<Triple>>& preds,
                                const Corpus& gold, MatchMode mode);

std::string format_report(const EvalReport& report);
std::string report_to_json(const EvalReport& report);

}  // namespace tripex
