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

#include "tripex/synth.hpp"

#include <algorithm>
#include <cmath>

#include "tripex/rng.hpp"
#include "tripex/util.hpp"

namespace tripex {

namespace {

constexpr int kFillerCount = 6;
constexpr int kMaxEntities = 24;  // keeps each embedding well-visited in a small corpus
constexpr int kMinEntities = 4;   // a subject plus three distinct objects
constexpr int kSentenceMaxLen = 100;

struct Inventory {
  int entities = 0;
  int singles = 0;  // entity i < singles is "e{i}"; the rest are "e{i} q{i}"

  std::string entity(int i) const {
    return i < singles ? "e" + std::to_string(i) : "e" + std::to_string(i) + " q" + std::to_string(i);
  }
};

// Picks the largest entity pool whose surface tokens fit the budget next to
// the cue, dual-cue, and filler tokens.
Inventory plan_inventory(const SynthConfig& config, bool need_epo) {
  const int base = 2 + config.relations + (need_epo ? config.relations : 0) + kFillerCount;
  Inventory inv;
  for (int e = kMinEntities; e <= kMaxEntities; ++e) {
    const int doubles = e / 3;
    if (base + e + doubles <= config.vocab_budget) {
      inv.entities = e;
      inv.singles = e - doubles;
    }
  }
  if (inv.entities == 0) {
    throw ConfigError("synthetic corpus: vocabulary budget " +
                      std::to_string(config.vocab_budget) + " cannot fit " +
                      std::to_string(base + kMinEntities) + "+ tokens");
  }
  return inv;
}

// Largest-remainder split of `total` across the three fractions.
std::array<int, 3> apportion(int total, const std::array<double, 3>& fracs) {
  std::array<int, 3> counts;
  std::array<double, 3> remainders;
  int assigned = 0;
  for (int i = 0; i < 3; ++i) {
    const double exact = fracs[static_cast<size_t>(i)] * total;
    counts[static_cast<size_t>(i)] = static_cast<int>(std::floor(exact));
    remainders[static_cast<size_t>(i)] = exact - std::floor(exact);
    assigned += counts[static_cast<size_t>(i)];
  }
  while (assigned < total) {
    int best = 0;
    for (int i = 1; i < 3; ++i) {
      if (remainders[static_cast<size_t>(i)] > remainders[static_cast<size_t>(best)]) best = i;
    }
    counts[static_cast<size_t>(best)] += 1;
    remainders[static_cast<size_t>(best)] = -1.0;
    assigned += 1;
  }
  return counts;
}

class Builder {
 public:
  Builder(const SynthConfig& config, const Inventory& inv, Rng& rng)
      : config_(config), inv_(inv), rng_(rng) {}

  // Draws `n` entity ids distinct from each other and from `taken`.
  std::vector<int> draw_entities(int n, std::vector<int> taken = {}) {
    std::vector<int> out;
    while (static_cast<int>(out.size()) < n) {
      const int e = static_cast<int>(rng_.below(static_cast<uint64_t>(inv_.entities)));
      bool dup = std::find(taken.begin(), taken.end(), e) != taken.end() ||
                 std::find(out.begin(), out.end(), e) != out.end();
      if (!dup) out.push_back(e);
    }
    return out;
  }

  void fillers(std::string& text, int max_count) {
    const int count = static_cast<int>(rng_.below(static_cast<uint64_t>(max_count + 1)));
    for (int i = 0; i < count; ++i) append(text, filler());
  }

  std::string filler() {
    return "w" + std::to_string(rng_.below(kFillerCount));
  }

  int relation() { return static_cast<int>(rng_.below(static_cast<uint64_t>(config_.relations))); }

  static void append(std::string& text, const std::string& part) {
    if (!text.empty()) text += ' ';
    text += part;
  }

  std::string rel_name(int r) const { return "rel" + std::to_string(r); }

  // One clause "S cue{r} O"; appends its triple.
  void clause(std::string& text, std::vector<Triple>& triples, int subject, int object) {
    const int r = relation();
    append(text, inv_.entity(subject));
    append(text, "cue" + std::to_string(r));
    append(text, inv_.entity(object));
    triples.push_back({inv_.entity(subject), rel_name(r), inv_.entity(object)});
  }

  void make_normal(std::string& text, std::vector<Triple>& triples) {
    const bool two_clauses = rng_.below(5) < 2;  // 40% carry a second, disjoint clause
    const auto ids = draw_entities(two_clauses ? 4 : 2);
    fillers(text, 2);
    clause(text, triples, ids[0], ids[1]);
    if (two_clauses) {
      append(text, filler());
      clause(text, triples, ids[2], ids[3]);
    }
    fillers(text, 2);
  }

  void make_epo(std::string& text, std::vector<Triple>& triples) {
    const auto ids = draw_entities(2);
    const int a = relation();
    const int b = (a + 1) % config_.relations;
    fillers(text, 2);
    append(text, inv_.entity(ids[0]));
    append(text, "dcue" + std::to_string(a));
    append(text, inv_.entity(ids[1]));
    fillers(text, 2);
    triples.push_back({inv_.entity(ids[0]), rel_name(a), inv_.entity(ids[1])});
    triples.push_back({inv_.entity(ids[0]), rel_name(b), inv_.entity(ids[1])});
  }

  void make_seo(std::string& text, std::vector<Triple>& triples) {
    const int objects = 2 + static_cast<int>(rng_.below(2));
    const auto ids = draw_entities(1 + objects);
    fillers(text, 2);
    append(text, inv_.entity(ids[0]));
    for (int k = 0; k < objects; ++k) {
      if (k > 0) append(text, filler());
      const int r = relation();
      append(text, "cue" + std::to_string(r));
      append(text, inv_.entity(ids[static_cast<size_t>(1 + k)]));
      triples.push_back(
          {inv_.entity(ids[0]), rel_name(r), inv_.entity(ids[static_cast<size_t>(1 + k)])});
    }
    fillers(text, 2);
  }

 private:
  const SynthConfig& config_;
  const Inventory& inv_;
  Rng& rng_;
};

}  // namespace

void SynthConfig::validate() const {
  if (vocab_budget < 1) throw ConfigError("synthetic corpus: vocabulary budget must be >= 1");
  if (relations < 1) throw ConfigError("synthetic corpus: need at least one relation");
  if (sentences < 1) throw ConfigError("synthetic corpus: need at least one sentence");
  if (normal_frac < 0 || epo_frac < 0 || seo_frac < 0) {
    throw ConfigError("synthetic corpus: mix fractions must be >= 0");
  }
  const double total = normal_frac + epo_frac + seo_frac;
  if (std::abs(total - 1.0) > 1e-9) {
    throw ConfigError("synthetic corpus: mix fractions must sum to 1, got " +
                      std::to_string(total));
  }
  if (epo_frac > 0 && relations < 2) {
    throw ConfigError(
        "synthetic corpus: entity-pair overlap emits two relations per pair and needs at "
        "least 2 relations");
  }
}

SynthResult generate_synthetic(const SynthConfig& config) {
  config.validate();
  const auto counts =
      apportion(config.sentences, {config.normal_frac, config.epo_frac, config.seo_frac});
  if (counts[1] > 0 && config.relations < 2) {
    throw ConfigError("synthetic corpus: entity-pair overlap needs at least 2 relations");
  }
  const Inventory inv = plan_inventory(config, counts[1] > 0);

  SynthResult result;
  for (int r = 0; r < config.relations; ++r) result.relations.add("rel" + std::to_string(r));

  // Category per sentence, shuffled so the file interleaves patterns.
  std::vector<int> categories;
  for (int c = 0; c < 3; ++c) {
    categories.insert(categories.end(), static_cast<size_t>(counts[static_cast<size_t>(c)]), c);
  }
  Rng rng(config.seed);
  rng.shuffle(categories);

  Builder builder(config, inv, rng);
  for (int category : categories) {
    std::string text;
    std::vector<Triple> triples;
    switch (category) {
      case 0: builder.make_normal(text, triples); break;
      case 1: builder.make_epo(text, triples); break;
      default: builder.make_seo(text, triples); break;
    }
    Sentence s = make_sentence(text, triples, result.relations, kSentenceMaxLen,
                               /*extend_relations=*/false, nullptr);
    if (s.resolved.size() != s.triples.size()) {
      throw Error("synthetic corpus: generated entity failed to resolve in '" + text + "'");
    }
    const OverlapFlags flags = categorize_overlap(s.triples);
    const bool ok = category == 0 ? flags.normal : (category == 1 ? flags.epo : flags.seo);
    if (!ok) throw Error("synthetic corpus: pattern contract violated for '" + text + "'");
    result.corpus.sentences.push_back(std::move(s));
  }
  return result;
}

}  // namespace tripex
