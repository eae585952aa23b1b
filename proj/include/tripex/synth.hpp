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

#include <cstdint>

#include "tripex/corpus.hpp"

namespace tripex {

// Knobs for the template corpus generator. The token inventory (entities,
// relation cues, fillers) is a pure function of the non-seed fields, so
// corpora produced with different seeds but one config draw from the same
// vocabulary — a train/test split is just two seeds.
struct SynthConfig {
  int vocab_budget = 80;     // distinct surface tokens allowed, <pad>/<unk> included
  int relations = 4;
  int sentences = 200;
  double normal_frac = 0.4;  // fractions must be >= 0 and sum to 1
  double epo_frac = 0.3;
  double seo_frac = 0.3;
  uint64_t seed = 1;

  void validate() const;  // throws ConfigError, incl. infeasible mixes
};

struct SynthResult {
  Corpus corpus;
  RelationSet relations;  // rel0..rel{R-1}, ids in that order
};

// Deterministic per config+seed. Sentence patterns:
//   normal: [fillers] S cue{r} O [fillers], one or two such clauses with
//           disjoint entities -> one triple per clause, no overlap
//   epo:    S dcue{a} O -> (S, rel{a}, O) and (S, rel{a+1 mod R}, O),
//           two relations over one entity pair
//   seo:    S cue{r1} O1 .. cue{rk} Ok chain, k in {2,3}, distinct objects
//           sharing the subject
// Entities are one-token ("e7") or two-token ("e19 q19") strings; every
// entity occurs verbatim in its sentence, so spans always resolve.
SynthResult generate_synthetic(const SynthConfig& config);

}  // namespace tripex
