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
#include <map>
#include <string>
#include <vector>

#include "tripex/tagger.hpp"

namespace tripex {

// A gold or predicted fact as annotated: raw surface strings.
struct Triple {
  std::string subject;
  std::string relation;
  std::string object;

  bool operator==(const Triple& o) const {
    return subject == o.subject && relation == o.relation && object == o.object;
  }
  bool operator<(const Triple& o) const {
    if (subject != o.subject) return subject < o.subject;
    if (relation != o.relation) return relation < o.relation;
    return object < o.object;
  }
};

// A triple whose entities were located in the sentence's tokens; only these
// can supervise training.
struct ResolvedTriple {
  std::string subject;
  std::string object;
  int relation_id = 0;
  Span subject_span;
  Span object_span;
};

struct Sentence {
  std::string text;
  std::vector<std::string> tokens;      // whitespace split, truncated to max length
  std::vector<Triple> triples;          // deduplicated gold annotation
  std::vector<ResolvedTriple> resolved; // the locatable subset, spans inside tokens
};

// Dense relation name <-> id registry; ids are assignment order.
struct RelationSet {
  std::vector<std::string> names;
  std::map<std::string, int> ids;

  int add(const std::string& name);              // existing id or a fresh one
  int id_of(const std::string& name) const;      // -1 when unknown
  int size() const { return static_cast<int>(names.size()); }
};

struct Corpus {
  std::vector<Sentence> sentences;
  int dropped_triples = 0;  // gold triples unusable for training (unlocatable or truncated away)
};

// Sentence-level overlap pattern flags. A sentence can be both epo and seo;
// normal excludes both.
struct OverlapFlags {
  bool normal = false;
  bool epo = false;
  bool seo = false;
};

// Locates `entity`'s whitespace tokens as a contiguous subsequence of
// `tokens` (first occurrence). Returns false if absent.
bool locate_span(const std::vector<std::string>& tokens, const std::string& entity, Span* span);

// Parses line-delimited records {"text": ..., "triple_list": [[s, r, o], ...]}.
// Gold triples are deduplicated; spans are resolved against the truncated
// token list, and triples that fail to resolve are counted in
// dropped_triples but stay in the sentence's gold annotation. Unknown
// relation names extend `relations` when `extend_relations` is set and are
// an error otherwise. Malformed lines throw Error with the line number.
Corpus load_corpus(const std::string& path, RelationSet& relations, int max_len,
                   bool extend_relations);

// Same parsing/resolution applied to an in-memory record list; the loader
// and the synthetic generator share it.
Sentence make_sentence(const std::string& text, const std::vector<Triple>& triples,
                       RelationSet& relations, int max_len, bool extend_relations,
                       int* dropped);

std::string corpus_to_jsonl(const std::vector<Sentence>& sentences);
void save_corpus(const std::string& path, const std::vector<Sentence>& sentences);

// EPO: some two distinct triples carry the same unordered entity pair.
// SEO: some two distinct triples share an entity without being the same
// unordered pair. Normal: neither (vacuously, zero or one triple).
OverlapFlags categorize_overlap(const std::vector<Triple>& triples);

// Triple-count bucket: 0 for none (reported separately), 1-4 exact, 5 for
// five or more.
int triple_bucket(size_t triple_count);
inline constexpr int kBucketCount = 6;
extern const char* const kBucketLabels[kBucketCount];

// Sentence indices per bucket, index 0..5 as triple_bucket.
std::array<std::vector<int>, kBucketCount> bucket_by_triple_count(const Corpus& corpus);

struct CorpusStats {
  long all = 0;
  long normal = 0;
  long epo = 0;
  long seo = 0;
  std::array<long, kBucketCount> by_count{};
  std::map<std::string, long> relation_histogram;
};

CorpusStats corpus_stats(const Corpus& corpus);
std::string format_stats(const CorpusStats& stats);     // aligned text table
std::string stats_to_json(const CorpusStats& stats);    // machine-readable record

// Token-id registry. Id 0 is the padding token, id 1 the unknown token;
// the rest follow first occurrence in the corpus.
struct Vocab {
  std::vector<std::string> tokens;
  std::map<std::string, int> ids;

  static Vocab build(const Corpus& corpus);
  static Vocab load(const std::string& path);
  void save(const std::string& path) const;

  int id_of(const std::string& token) const;  // unk id when absent
  std::vector<int> encode(const std::vector<std::string>& tokens) const;
  int size() const { return static_cast<int>(tokens.size()); }
};

inline constexpr const char* kPadToken = "<pad>";
inline constexpr const char* kUnkToken = "<unk>";
inline constexpr int kPadId = 0;
inline constexpr int kUnkId = 1;

}  // namespace tripex
