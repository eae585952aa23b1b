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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "tripex/corpus.hpp"
#include "tripex/model.hpp"
#include "tripex/tagger.hpp"
#include "tripex/util.hpp"

namespace tripex {
namespace {

RelationSet two_relations() {
  RelationSet relations;
  relations.add("r0");
  relations.add("r1");
  return relations;
}

Sentence sentence_of(const std::string& text, const std::vector<Triple>& triples,
                     RelationSet& relations) {
  int dropped = 0;
  Sentence s = make_sentence(text, triples, relations, 16, /*extend_relations=*/false, &dropped);
  REQUIRE(dropped == 0);
  return s;
}

// Six short sentences over a handful of tokens, with single- and
// multi-subject patterns.
Corpus tiny_corpus(RelationSet& relations) {
  Corpus corpus;
  corpus.sentences.push_back(sentence_of("a x b", {{"a", "r0", "b"}}, relations));
  corpus.sentences.push_back(sentence_of("c y d", {{"c", "r1", "d"}}, relations));
  corpus.sentences.push_back(
      sentence_of("a x d y b", {{"a", "r0", "d"}, {"a", "r1", "b"}}, relations));
  corpus.sentences.push_back(
      sentence_of("b y c x a", {{"b", "r1", "c"}, {"c", "r0", "a"}}, relations));
  corpus.sentences.push_back(sentence_of("d x a", {{"d", "r0", "a"}}, relations));
  corpus.sentences.push_back(
      sentence_of("c x b y d", {{"c", "r0", "b"}, {"c", "r1", "d"}}, relations));
  return corpus;
}

Model tiny_model(const Corpus& corpus, const RelationSet& relations, uint64_t seed) {
  EncoderConfig config;
  config.kind = EncoderKind::kTransformer;
  config.hidden = 4;
  config.blocks = 1;
  config.heads = 2;
  config.ffn = 6;
  config.max_len = 16;
  config.vocab = Vocab::build(corpus).size();
  return init_model(config, relations, seed);
}

void zero_params(Model& model) {
  for (auto& [name, tensor] : model.params) {
    for (double& x : tensor.v) x = 0.0;
  }
}

// Independent loss computation along the pure tagging path: negative
// summed log-likelihood of the gold fields under the model's probabilities,
// with every gold subject marked in one shared subject field.
double loss_oracle(const Sentence& sentence, const std::vector<int>& ids, const Model& model) {
  const std::vector<SubjectGroup> groups = subject_groups(sentence);
  const Tensor h = encode_sentence(model, ids);
  const int len = static_cast<int>(ids.size());
  const int relation_count = model.relations.size();

  GoldField subject_gold;
  subject_gold.start.assign(static_cast<size_t>(len), 0.0);
  subject_gold.end.assign(static_cast<size_t>(len), 0.0);
  for (const SubjectGroup& group : groups) {
    subject_gold.start[static_cast<size_t>(group.span.start)] = 1.0;
    subject_gold.end[static_cast<size_t>(group.span.end)] = 1.0;
  }
  double ll = span_log_likelihood(tag_subject(h, model.params, 0.5), subject_gold);

  for (const SubjectGroup& group : groups) {
    const Tensor v_sub = subject_vector(h, group.span);
    const GoldTags gold = build_gold_tags(len, group.span, group.objects, relation_count);
    for (int r = 0; r < relation_count; ++r) {
      ll += span_log_likelihood(tag_object(h, v_sub, r, relation_count, model.params, 0.5),
                                gold.objects[static_cast<size_t>(r)]);
    }
  }
  return -ll;
}

}  // namespace

TEST_CASE("zero parameters give the closed-form loss") {
  RelationSet relations = two_relations();
  Corpus corpus = tiny_corpus(relations);
  const Vocab vocab = Vocab::build(corpus);
  Model model = tiny_model(corpus, relations, 1);
  zero_params(model);

  // Every probability is one half, so each of the 2L subject terms and the
  // 2L terms per (group, relation) pair contributes ln 2.
  const Sentence& one_subject = corpus.sentences[0];  // L = 3, one group
  const std::vector<int> ids = vocab.encode(one_subject.tokens);
  const double want = 2.0 * 3.0 * std::log(2.0) * (1.0 + 1.0 * 2.0);
  CHECK(sentence_loss(one_subject, ids, model, SubjectMode::kAllSubjects) ==
        doctest::Approx(want).epsilon(1e-12));

  const Sentence& two_subjects = corpus.sentences[3];  // L = 5, two groups
  const std::vector<int> ids2 = vocab.encode(two_subjects.tokens);
  const double want2 = 2.0 * 5.0 * std::log(2.0) * (1.0 + 2.0 * 2.0);
  CHECK(sentence_loss(two_subjects, ids2, model, SubjectMode::kAllSubjects) ==
        doctest::Approx(want2).epsilon(1e-12));

  // No gold triples leaves only the subject field.
  RelationSet rs = two_relations();
  const Sentence empty_gold = sentence_of("a x b", {}, rs);
  CHECK(sentence_loss(empty_gold, vocab.encode(empty_gold.tokens), model,
                      SubjectMode::kAllSubjects) ==
        doctest::Approx(2.0 * 3.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("the graph loss matches the log-likelihood oracle") {
  RelationSet relations = two_relations();
  Corpus corpus = tiny_corpus(relations);
  const Vocab vocab = Vocab::build(corpus);
  const Model model = tiny_model(corpus, relations, 7);

  for (const Sentence& sentence : corpus.sentences) {
    const std::vector<int> ids = vocab.encode(sentence.tokens);
    const double got = sentence_loss(sentence, ids, model, SubjectMode::kAllSubjects);
    const double want = loss_oracle(sentence, ids, model);
    INFO("sentence: ", sentence.text);
    CHECK(std::fabs(got - want) <= 1e-10 * std::max(1.0, std::fabs(want)));
  }
}

TEST_CASE("sampling one subject drops the other groups' object terms") {
  RelationSet relations = two_relations();
  Corpus corpus = tiny_corpus(relations);
  const Vocab vocab = Vocab::build(corpus);
  Model model = tiny_model(corpus, relations, 1);
  zero_params(model);

  // Two groups, L = 5: all subjects cost 2L ln2 (1 + 2|R|); one sampled
  // group costs 2L ln2 (1 + |R|) whichever group the draw picks.
  const Sentence& sentence = corpus.sentences[3];
  const std::vector<int> ids = vocab.encode(sentence.tokens);
  Rng sampler(3);
  const double sampled = sentence_loss(sentence, ids, model, SubjectMode::kSampleOne, &sampler);
  CHECK(sampled == doctest::Approx(2.0 * 5.0 * std::log(2.0) * 3.0).epsilon(1e-12));

  CHECK_THROWS_AS(sentence_loss(sentence, ids, model, SubjectMode::kSampleOne), Error);
}

TEST_CASE("subject groups sort by span and collect objects per subject") {
  RelationSet relations = two_relations();
  const Sentence s = sentence_of(
      "a b c d", {{"c", "r0", "a"}, {"a", "r0", "b"}, {"a", "r1", "d"}}, relations);
  const std::vector<SubjectGroup> groups = subject_groups(s);

  REQUIRE(groups.size() == 2);
  CHECK(groups[0].subject == "a");
  CHECK(groups[0].span == Span{0, 0});
  REQUIRE(groups[0].objects.size() == 2);
  CHECK(groups[0].objects[0] == std::pair<int, Span>{0, {1, 1}});
  CHECK(groups[0].objects[1] == std::pair<int, Span>{1, {3, 3}});
  CHECK(groups[1].subject == "c");
  CHECK(groups[1].span == Span{2, 2});
  REQUIRE(groups[1].objects.size() == 1);
  CHECK(groups[1].objects[0] == std::pair<int, Span>{0, {0, 0}});
}

TEST_CASE("a single-batch epoch reports the mean initial loss") {
  RelationSet relations = two_relations();
  Corpus corpus = tiny_corpus(relations);
  const Vocab vocab = Vocab::build(corpus);
  Model model = tiny_model(corpus, relations, 5);
  const Model initial = model;

  double mean = 0.0;
  for (const Sentence& sentence : corpus.sentences) {
    mean += sentence_loss(sentence, vocab.encode(sentence.tokens), initial,
                          SubjectMode::kAllSubjects);
  }
  mean /= static_cast<double>(corpus.sentences.size());

  TrainConfig config;
  config.batch_size = static_cast<int>(corpus.sentences.size());
  config.max_epochs = 1;
  TrainHooks hooks;
  hooks.validation_metric = [](const Model&) { return 0.0; };
  const TrainHistory history = train(model, corpus, corpus, vocab, config, hooks);

  REQUIRE(history.epochs.size() == 1);
  CHECK(history.epochs[0].loss == doctest::Approx(mean).epsilon(1e-12));
}

TEST_CASE("early epochs reduce the training loss") {
  RelationSet relations = two_relations();
  Corpus corpus = tiny_corpus(relations);
  const Vocab vocab = Vocab::build(corpus);
  Model model = tiny_model(corpus, relations, 9);

  TrainConfig config;
  config.max_epochs = 3;
  config.patience = 3;
  TrainHooks hooks;
  hooks.validation_metric = [](const Model&) { return 0.0; };
  const TrainHistory history = train(model, corpus, corpus, vocab, config, hooks);

  REQUIRE(history.epochs.size() == 3);
  CHECK(history.epochs[1].loss < history.epochs[0].loss);
  CHECK(history.epochs[2].loss < history.epochs[1].loss);
}

TEST_CASE("the gold triple listing order does not change training") {
  RelationSet relations_a = two_relations();
  RelationSet relations_b = two_relations();
  Corpus forward;
  Corpus reversed;
  const std::vector<std::vector<Triple>> gold = {
      {{"a", "r0", "b"}, {"a", "r1", "d"}, {"c", "r0", "a"}},
      {{"b", "r1", "c"}, {"c", "r0", "a"}},
  };
  const std::vector<std::string> texts = {"a b c d", "b y c x a"};
  for (size_t i = 0; i < texts.size(); ++i) {
    std::vector<Triple> backwards(gold[i].rbegin(), gold[i].rend());
    forward.sentences.push_back(sentence_of(texts[i], gold[i], relations_a));
    reversed.sentences.push_back(sentence_of(texts[i], backwards, relations_b));
  }

  const Vocab vocab = Vocab::build(forward);
  Model model_a = tiny_model(forward, relations_a, 13);
  Model model_b = tiny_model(reversed, relations_b, 13);

  TrainConfig config;
  config.max_epochs = 2;
  config.patience = 2;
  TrainHooks hooks;
  hooks.validation_metric = [](const Model&) { return 0.0; };
  const TrainHistory ha = train(model_a, forward, forward, vocab, config, hooks);
  const TrainHistory hb = train(model_b, reversed, reversed, vocab, config, hooks);

  REQUIRE(ha.epochs.size() == hb.epochs.size());
  for (size_t i = 0; i < ha.epochs.size(); ++i) {
    CHECK(ha.epochs[i].loss == hb.epochs[i].loss);
  }
  CHECK(model_a.params == model_b.params);
}

TEST_CASE("a flat validation metric stops after exactly patience stalls") {
  RelationSet relations = two_relations();
  Corpus corpus = tiny_corpus(relations);
  const Vocab vocab = Vocab::build(corpus);
  Model model = tiny_model(corpus, relations, 17);

  TrainConfig config;
  config.max_epochs = 50;
  config.patience = 3;
  TrainHooks hooks;
  // 0.5 improves on the initial 0 once; every later epoch stalls.
  hooks.validation_metric = [](const Model&) { return 0.5; };
  const TrainHistory history = train(model, corpus, corpus, vocab, config, hooks);

  CHECK(history.epochs.size() == 4);  // 1 improvement + 3 stalls
  CHECK(history.best_epoch == 1);
  CHECK(history.best_val_f1 == 0.5);
}

TEST_CASE("an improvement resets the stall counter") {
  RelationSet relations = two_relations();
  Corpus corpus = tiny_corpus(relations);
  const Vocab vocab = Vocab::build(corpus);
  Model model = tiny_model(corpus, relations, 19);

  TrainConfig config;
  config.max_epochs = 50;
  config.patience = 2;
  const std::vector<double> script = {0.1, 0.1, 0.2, 0.2, 0.2};
  int call = 0;
  TrainHooks hooks;
  hooks.validation_metric = [&](const Model&) {
    const double value = script[static_cast<size_t>(call) % script.size()];
    ++call;
    return value;
  };
  const TrainHistory history = train(model, corpus, corpus, vocab, config, hooks);

  // Epochs: best(0.1), stall, best(0.2), stall, stall -> stop after five.
  CHECK(history.epochs.size() == 5);
  CHECK(history.best_epoch == 3);
  CHECK(history.best_val_f1 == 0.2);
}

TEST_CASE("training restores the best epoch's parameters") {
  RelationSet relations = two_relations();
  Corpus corpus = tiny_corpus(relations);
  const Vocab vocab = Vocab::build(corpus);
  Model model = tiny_model(corpus, relations, 23);

  TrainConfig config;
  config.max_epochs = 50;
  config.patience = 2;
  int call = 0;
  ParamStore best_snapshot;
  TrainHooks hooks;
  // Only the first epoch improves; training then runs two more epochs whose
  // updates must be rolled back.
  hooks.validation_metric = [&](const Model&) { return call++ == 0 ? 1.0 : 0.0; };
  hooks.on_best = [&](const Model& m, const EpochRecord& record) {
    CHECK(record.epoch == 1);
    best_snapshot = m.params;
  };
  const TrainHistory history = train(model, corpus, corpus, vocab, config, hooks);

  CHECK(history.epochs.size() == 3);
  CHECK(history.best_epoch == 1);
  REQUIRE_FALSE(best_snapshot.empty());
  CHECK(model.params == best_snapshot);
}

TEST_CASE("two identical runs are bitwise identical") {
  RelationSet relations = two_relations();
  Corpus corpus = tiny_corpus(relations);
  const Vocab vocab = Vocab::build(corpus);

  TrainConfig config;
  config.max_epochs = 3;
  config.patience = 3;

  // The default validation metric (extraction F1 over the val corpus) runs
  // too, so this covers the whole loop including the parallel batch path.
  Model model_a = tiny_model(corpus, relations, 29);
  const TrainHistory ha = train(model_a, corpus, corpus, vocab, config);
  Model model_b = tiny_model(corpus, relations, 29);
  const TrainHistory hb = train(model_b, corpus, corpus, vocab, config);

  REQUIRE(ha.epochs.size() == hb.epochs.size());
  for (size_t i = 0; i < ha.epochs.size(); ++i) {
    CHECK(ha.epochs[i].loss == hb.epochs[i].loss);
    CHECK(ha.epochs[i].val_f1 == hb.epochs[i].val_f1);
  }
  CHECK(ha.best_epoch == hb.best_epoch);
  CHECK(model_a.params == model_b.params);
}

TEST_CASE("sampling mode matches all-subjects on single-subject sentences") {
  RelationSet relations = two_relations();
  Corpus corpus;
  corpus.sentences.push_back(sentence_of("a x b", {{"a", "r0", "b"}}, relations));
  corpus.sentences.push_back(sentence_of("c y d", {{"c", "r1", "d"}}, relations));
  corpus.sentences.push_back(sentence_of("d x a", {{"d", "r0", "a"}}, relations));
  const Vocab vocab = Vocab::build(corpus);

  TrainConfig config;
  config.max_epochs = 1;
  TrainHooks hooks;
  hooks.validation_metric = [](const Model&) { return 0.0; };

  Model all = tiny_model(corpus, relations, 31);
  config.subject_mode = SubjectMode::kAllSubjects;
  const TrainHistory ha = train(all, corpus, corpus, vocab, config, hooks);

  Model sampled = tiny_model(corpus, relations, 31);
  config.subject_mode = SubjectMode::kSampleOne;
  const TrainHistory hs = train(sampled, corpus, corpus, vocab, config, hooks);

  // With one subject group per sentence the draw is forced, so the first
  // epoch's arithmetic is identical term for term.
  CHECK(ha.epochs[0].loss == hs.epochs[0].loss);
  CHECK(all.params == sampled.params);
}

TEST_CASE("a poisoned parameter raises a divergence error") {
  RelationSet relations = two_relations();
  Corpus corpus = tiny_corpus(relations);
  const Vocab vocab = Vocab::build(corpus);
  Model model = tiny_model(corpus, relations, 37);
  model.params.at("subj.bs").at(0, 0) = std::numeric_limits<double>::quiet_NaN();

  TrainConfig config;
  config.max_epochs = 2;
  try {
    train(model, corpus, corpus, vocab, config);
    FAIL("expected a divergence error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("diverged") != std::string::npos);
  }
}

TEST_CASE("training requires at least one non-empty sentence") {
  RelationSet relations = two_relations();
  Corpus corpus;
  corpus.sentences.push_back(Sentence{});
  const Vocab vocab = Vocab::build(corpus);
  Model model = tiny_model(corpus, relations, 1);
  TrainConfig config;
  CHECK_THROWS_AS(train(model, corpus, corpus, vocab, config), Error);
}

TEST_CASE("training configuration validation") {
  TrainConfig config;
  CHECK_NOTHROW(config.validate());

  TrainConfig bad = config;
  bad.batch_size = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = config;
  bad.lr = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = config;
  bad.lr = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = config;
  bad.threshold = -0.1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = config;
  bad.threshold = 1.1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = config;
  bad.patience = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = config;
  bad.max_epochs = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  CHECK(parse_subject_mode("all-subjects") == SubjectMode::kAllSubjects);
  CHECK(parse_subject_mode("sample-one") == SubjectMode::kSampleOne);
  CHECK_THROWS_AS(parse_subject_mode("everything"), ConfigError);
  CHECK(std::string(subject_mode_name(SubjectMode::kAllSubjects)) == "all-subjects");
  CHECK(std::string(subject_mode_name(SubjectMode::kSampleOne)) == "sample-one");
}

TEST_CASE("the history log serializes epochs without wall-clock times") {
  TrainHistory history;
  history.epochs.push_back({1, 2.5, 0.125, 99.0});
  history.epochs.push_back({2, 1.25, 0.5, 77.0});
  history.best_epoch = 2;
  history.best_val_f1 = 0.5;

  const std::string log = history_to_jsonl(history);
  CHECK(log.find("\"epoch\":1") != std::string::npos);
  CHECK(log.find("\"epoch\":2") != std::string::npos);
  CHECK(log.find("val_f1") != std::string::npos);
  CHECK(log.find("wall") == std::string::npos);
  CHECK(log.find("99") == std::string::npos);
  // One line per epoch, each a complete record.
  CHECK(std::count(log.begin(), log.end(), '\n') == 2);
}

}  // namespace tripex
