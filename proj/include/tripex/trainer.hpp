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
#include <functional>
#include <string>
#include <vector>

#include "tripex/corpus.hpp"
#include "tripex/graph.hpp"
#include "tripex/model.hpp"
#include "tripex/rng.hpp"
#include "tripex/tagger.hpp"

namespace tripex {

// Which gold subjects contribute object-tagger terms to a sentence's loss:
// every subject, or one drawn at random per visit.
enum class SubjectMode { kAllSubjects, kSampleOne };

const char* subject_mode_name(SubjectMode mode);
SubjectMode parse_subject_mode(const std::string& name);  // throws ConfigError

struct TrainConfig {
  int batch_size = 6;
  double lr = 1e-3;
  double threshold = 0.5;  // binarization threshold used for validation F1
  int patience = 7;        // epochs without val-F1 improvement before stopping
  int max_epochs = 100;
  uint64_t seed = 1;
  SubjectMode subject_mode = SubjectMode::kAllSubjects;

  void validate() const;  // throws ConfigError
};

// Learning rate matched to fine-tuning a large pre-trained encoder. The
// compact from-scratch encoders here train far better at the 1e-3 default,
// so this is kept only as a documented preset.
inline constexpr double kReferenceLr = 1e-5;

// All gold triples of one subject, grouped for teacher forcing: the
// subject's span plus every (relation id, object span) it leads.
struct SubjectGroup {
  Span span;
  std::string subject;
  std::vector<std::pair<int, Span>> objects;
};

// Groups a sentence's resolved triples by subject, ordered by (span,
// subject string). Only resolved triples contribute.
std::vector<SubjectGroup> subject_groups(const Sentence& sentence);

// Builds the full loss graph for one sentence and returns the scalar loss
// node: embed -> encoder -> one subject-field BCE marking every gold
// subject, plus object-field BCEs for each group (teacher forcing with the
// gold span's mean vector). `only_group` restricts the object terms to one
// group index; -1 keeps them all. Gold tags are baked in as constants, so
// the graph needs no bindings.
int append_sentence_loss(ExprGraph& g, const std::vector<int>& token_ids,
                         const std::vector<SubjectGroup>& groups, const EncoderConfig& config,
                         int relation_count, int only_group = -1);

// Loss of one sentence under the model. In sample-one mode a sampler must
// be supplied to draw the subject group.
double sentence_loss(const Sentence& sentence, const std::vector<int>& token_ids,
                     const Model& model, SubjectMode mode, Rng* sampler = nullptr);

struct EpochRecord {
  int epoch = 0;       // 1-based
  double loss = 0.0;   // mean sentence loss over the epoch
  double val_f1 = 0.0;
  double wall_ms = 0.0;  // in-memory only; never serialized
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;  // 1-based; 0 if training never ran
  double best_val_f1 = 0.0;
};

// Optional instrumentation. `validation_metric` replaces the default
// (partial-match micro-F1 on the validation corpus); `on_best` fires after
// each new best epoch with the current (best) model; `on_epoch` fires for
// every epoch.
struct TrainHooks {
  std::function<double(const Model&)> validation_metric;
  std::function<void(const Model&, const EpochRecord&)> on_best;
  std::function<void(const EpochRecord&)> on_epoch;
};

// Mini-batch Adam training with early stopping: per epoch, shuffle, average
// per-sentence gradients over each batch, step, then score the validation
// corpus. Stops after `patience` consecutive epochs without strict val-F1
// improvement (or at max_epochs) and restores the best epoch's parameters.
// Throws Error if the loss turns non-finite.
TrainHistory train(Model& model, const Corpus& train_corpus, const Corpus& val_corpus,
                   const Vocab& vocab, const TrainConfig& config, const TrainHooks& hooks = {});

// Partial-match micro-F1 of the model's extractions against a corpus.
double validation_f1(const Model& model, const Corpus& corpus, const Vocab& vocab,
                     double threshold);

// One JSON object per epoch: {"epoch":..,"loss":..,"val_f1":..}. Wall-clock
// time is deliberately excluded so identical runs produce identical logs.
std::string history_to_jsonl(const TrainHistory& history);

}  // namespace tripex
