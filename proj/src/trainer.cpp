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

#include "tripex/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "tripex/adam.hpp"
#include "tripex/evaluator.hpp"
#include "tripex/extractor.hpp"
#include "tripex/kernels.hpp"
#include "tripex/util.hpp"

namespace tripex {

const char* subject_mode_name(SubjectMode mode) {
  return mode == SubjectMode::kAllSubjects ? "all-subjects" : "sample-one";
}

SubjectMode parse_subject_mode(const std::string& name) {
  if (name == "all-subjects") {
    return SubjectMode::kAllSubjects;
  }
  if (name == "sample-one") {
    return SubjectMode::kSampleOne;
  }
  throw ConfigError("unknown subject mode \"" + name +
                    "\" (expected all-subjects or sample-one)");
}

void TrainConfig::validate() const {
  if (batch_size < 1) {
    throw ConfigError("batch size must be at least 1");
  }
  if (!(lr > 0.0) || !std::isfinite(lr)) {
    throw ConfigError("learning rate must be a positive finite number");
  }
  if (threshold < 0.0 || threshold > 1.0) {
    throw ConfigError("threshold must lie in [0, 1]");
  }
  if (patience < 1) {
    throw ConfigError("patience must be at least 1");
  }
  if (max_epochs < 1) {
    throw ConfigError("max epochs must be at least 1");
  }
}

std::vector<SubjectGroup> subject_groups(const Sentence& sentence) {
  std::vector<SubjectGroup> groups;
  for (const ResolvedTriple& t : sentence.resolved) {
    SubjectGroup* group = nullptr;
    for (SubjectGroup& existing : groups) {
      if (existing.span == t.subject_span && existing.subject == t.subject) {
        group = &existing;
        break;
      }
    }
    if (group == nullptr) {
      groups.push_back(SubjectGroup{t.subject_span, t.subject, {}});
      group = &groups.back();
    }
    group->objects.emplace_back(t.relation_id, t.object_span);
  }
  std::stable_sort(groups.begin(), groups.end(),
                   [](const SubjectGroup& a, const SubjectGroup& b) {
                     if (!(a.span == b.span)) {
                       return a.span < b.span;
                     }
                     return a.subject < b.subject;
                   });
  return groups;
}

int append_sentence_loss(ExprGraph& g, const std::vector<int>& token_ids,
                         const std::vector<SubjectGroup>& groups, const EncoderConfig& config,
                         int relation_count, int only_group) {
  const int length = static_cast<int>(token_ids.size());
  if (length == 0) {
    throw Error("cannot build a loss for an empty sentence");
  }
  if (only_group < -1 || only_group >= static_cast<int>(groups.size())) {
    throw Error("subject group index " + std::to_string(only_group) + " out of range");
  }
  const int h0 = append_embed(g, token_ids, config);
  const int h = append_encoder(g, h0, config);

  // One subject field per sentence, marking every gold subject. A sentence
  // with no subjects trains the field toward all zeros.
  std::vector<double> subj_start(length, 0.0);
  std::vector<double> subj_end(length, 0.0);
  for (const SubjectGroup& group : groups) {
    if (group.span.start < 0 || group.span.end < group.span.start ||
        group.span.end >= length) {
      throw Error("subject span out of range in loss construction");
    }
    subj_start[group.span.start] = 1.0;
    subj_end[group.span.end] = 1.0;
  }
  const auto [s_start, s_end] = append_subject_probs(g, h, config.hidden);
  int loss = g.sum(g.bce(s_start, g.constant(Tensor::column(subj_start))));
  loss = g.add(loss, g.sum(g.bce(s_end, g.constant(Tensor::column(subj_end)))));

  for (int gi = 0; gi < static_cast<int>(groups.size()); ++gi) {
    if (only_group >= 0 && gi != only_group) {
      continue;
    }
    const SubjectGroup& group = groups[gi];
    std::vector<int> rows;
    for (int r = group.span.start; r <= group.span.end; ++r) {
      rows.push_back(r);
    }
    const int v_sub = g.mean_rows(g.gather_rows(h, rows));
    const GoldTags gold = build_gold_tags(length, group.span, group.objects, relation_count);
    for (int r = 0; r < relation_count; ++r) {
      const auto [o_start, o_end] = append_object_probs(g, h, v_sub, r, config.hidden);
      loss = g.add(loss, g.sum(g.bce(o_start, g.constant(Tensor::column(gold.objects[r].start)))));
      loss = g.add(loss, g.sum(g.bce(o_end, g.constant(Tensor::column(gold.objects[r].end)))));
    }
  }
  return loss;
}

double sentence_loss(const Sentence& sentence, const std::vector<int>& token_ids,
                     const Model& model, SubjectMode mode, Rng* sampler) {
  const std::vector<SubjectGroup> groups = subject_groups(sentence);
  int only_group = -1;
  if (mode == SubjectMode::kSampleOne && !groups.empty()) {
    if (sampler == nullptr) {
      throw Error("sample-one mode needs a sampler");
    }
    only_group = static_cast<int>(sampler->below(groups.size()));
  }
  ExprGraph g;
  const int loss =
      append_sentence_loss(g, token_ids, groups, model.encoder, model.relations.size(), only_group);
  EvalResult result = evaluate(g, model.params, Bindings{});
  return result.values[loss].at(0, 0);
}

double validation_f1(const Model& model, const Corpus& corpus, const Vocab& vocab,
                     double threshold) {
  const std::vector<std::vector<ExtractedTriple>> extracted =
      extract_corpus(corpus, vocab, model, threshold);
  std::vector<std::vector<Triple>> preds(extracted.size());
  std::vector<std::vector<Triple>> golds(extracted.size());
  for (size_t i = 0; i < extracted.size(); ++i) {
    preds[i] = to_triples(extracted[i]);
    golds[i] = corpus.sentences[i].triples;
  }
  return score_micro(preds, golds, MatchMode::kPartial).f1;
}

TrainHistory train(Model& model, const Corpus& train_corpus, const Corpus& val_corpus,
                   const Vocab& vocab, const TrainConfig& config, const TrainHooks& hooks) {
  config.validate();
  const int relation_count = model.relations.size();

  // Sentences without tokens carry no trainable signal and cannot be
  // embedded; leave them out of the epoch.
  std::vector<int> usable;
  for (int i = 0; i < static_cast<int>(train_corpus.sentences.size()); ++i) {
    if (!train_corpus.sentences[i].tokens.empty()) {
      usable.push_back(i);
    }
  }
  if (usable.empty()) {
    throw Error("training corpus has no usable sentences");
  }
  const int n = static_cast<int>(usable.size());

  std::vector<std::vector<int>> ids(train_corpus.sentences.size());
  std::vector<std::vector<SubjectGroup>> groups(train_corpus.sentences.size());
  for (int i : usable) {
    ids[i] = vocab.encode(train_corpus.sentences[i].tokens);
    groups[i] = subject_groups(train_corpus.sentences[i]);
  }

  Rng rng(config.seed);
  AdamConfig adam_config;
  adam_config.lr = config.lr;
  AdamState adam_state;

  TrainHistory history;
  double best_f1 = -std::numeric_limits<double>::infinity();
  ParamStore best_params;
  int stall = 0;

  std::vector<int> order(usable);
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto epoch_start = std::chrono::steady_clock::now();
    rng.shuffle(order);
    double loss_sum = 0.0;

    for (int begin = 0; begin < n; begin += config.batch_size) {
      const int batch_n = std::min(config.batch_size, n - begin);

      // Draws for sample-one mode happen serially, in batch order, so the
      // random stream is independent of thread count.
      std::vector<int> picks(batch_n, -1);
      if (config.subject_mode == SubjectMode::kSampleOne) {
        for (int bi = 0; bi < batch_n; ++bi) {
          const size_t count = groups[order[begin + bi]].size();
          if (count > 0) {
            picks[bi] = static_cast<int>(rng.below(count));
          }
        }
      }

      std::vector<GradMap> grads(batch_n);
      std::vector<double> losses(batch_n, 0.0);
      std::string failure;
#pragma omp parallel for schedule(dynamic) if (kern::parallel_enabled() && batch_n > 1)
      for (int bi = 0; bi < batch_n; ++bi) {
        try {
          const int si = order[begin + bi];
          ExprGraph g;
          const int loss = append_sentence_loss(g, ids[si], groups[si], model.encoder,
                                                relation_count, picks[bi]);
          grads[bi] = gradient(g, model.params, Bindings{}, loss, nullptr, &losses[bi]);
        } catch (const std::exception& e) {
#pragma omp critical
          if (failure.empty()) {
            failure = e.what();
          }
        }
      }
      if (!failure.empty()) {
        throw Error(failure);
      }
      for (double loss : losses) {
        if (!std::isfinite(loss)) {
          throw Error("training diverged: non-finite loss at epoch " + std::to_string(epoch));
        }
        loss_sum += loss;
      }

      // Mean gradient over the batch, accumulated in batch order so the
      // result does not depend on how the parallel loop was scheduled.
      GradMap mean;
      for (const auto& [name, tensor] : model.params) {
        mean.emplace(name, Tensor(tensor.rows, tensor.cols));
      }
      for (int bi = 0; bi < batch_n; ++bi) {
        for (auto& [name, acc] : mean) {
          const Tensor& g_bi = grads[bi].at(name);
          for (size_t k = 0; k < acc.v.size(); ++k) {
            acc.v[k] += g_bi.v[k];
          }
        }
      }
      const double inv = 1.0 / batch_n;
      for (auto& [name, acc] : mean) {
        for (double& x : acc.v) {
          x *= inv;
        }
      }
      adam_step(model.params, mean, adam_state, adam_config);
    }

    EpochRecord record;
    record.epoch = epoch;
    record.loss = loss_sum / n;
    if (!std::isfinite(record.loss)) {
      throw Error("training diverged: non-finite loss at epoch " + std::to_string(epoch));
    }
    record.val_f1 = hooks.validation_metric
                        ? hooks.validation_metric(model)
                        : validation_f1(model, val_corpus, vocab, config.threshold);
    record.wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - epoch_start)
                         .count();
    history.epochs.push_back(record);

    if (record.val_f1 > best_f1) {
      best_f1 = record.val_f1;
      history.best_epoch = epoch;
      history.best_val_f1 = record.val_f1;
      best_params = model.params;
      stall = 0;
      if (hooks.on_best) {
        hooks.on_best(model, record);
      }
    } else {
      ++stall;
    }
    if (hooks.on_epoch) {
      hooks.on_epoch(record);
    }
    if (stall >= config.patience) {
      break;
    }
  }

  // Hand back the best epoch's parameters, never a later, worse epoch's.
  if (history.best_epoch > 0) {
    model.params = std::move(best_params);
  }
  return history;
}

std::string history_to_jsonl(const TrainHistory& history) {
  std::string out;
  for (const EpochRecord& record : history.epochs) {
    nlohmann::json line;
    line["epoch"] = record.epoch;
    line["loss"] = record.loss;
    line["val_f1"] = record.val_f1;
    out += line.dump();
    out += '\n';
  }
  return out;
}

}  // namespace tripex
