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

#include "tripex/cli.hpp"

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tripex/corpus.hpp"
#include "tripex/evaluator.hpp"
#include "tripex/extractor.hpp"
#include "tripex/kernels.hpp"
#include "tripex/model.hpp"
#include "tripex/synth.hpp"
#include "tripex/trainer.hpp"
#include "tripex/util.hpp"

namespace tripex {
namespace {

// Wide enough that "no truncation" holds for any real input; commands that
// feed an encoder use its max_len instead.
constexpr int kNoTruncation = 1 << 20;

void warn_dropped(const Corpus& corpus, const std::string& path) {
  if (corpus.dropped_triples > 0) {
    std::cerr << "warning: " << path << ": dropped " << corpus.dropped_triples
              << " triple(s) whose entities could not be located in the text\n";
  }
}

struct TrainArgs {
  std::string input;
  std::string val;
  std::string output;
  std::string encoder = "transformer";
  int hidden = 32;
  int blocks = 2;
  int heads = 4;
  int ffn = 64;
  int max_len = 100;
  std::string subject_mode = "all-subjects";
  TrainConfig config;
};

void run_train(const TrainArgs& args) {
  EncoderConfig enc;
  enc.kind = parse_encoder_kind(args.encoder);
  enc.hidden = args.hidden;
  enc.blocks = args.blocks;
  enc.heads = args.heads;
  enc.ffn = args.ffn;
  enc.max_len = args.max_len;

  TrainConfig config = args.config;
  config.subject_mode = parse_subject_mode(args.subject_mode);
  config.validate();

  RelationSet relations;
  Corpus train_corpus = load_corpus(args.input, relations, enc.max_len, true);
  warn_dropped(train_corpus, args.input);
  Corpus val_corpus;
  if (args.val.empty()) {
    // Without a held-out set, validate on the training corpus itself.
    val_corpus = train_corpus;
  } else {
    val_corpus = load_corpus(args.val, relations, enc.max_len, true);
    warn_dropped(val_corpus, args.val);
  }

  const Vocab vocab = Vocab::build(train_corpus);
  enc.vocab = vocab.size();
  enc.validate();

  Model model = init_model(enc, relations, config.seed);
  std::cout << "training on " << train_corpus.sentences.size() << " sentences, "
            << relations.size() << " relations, vocab " << vocab.size() << "\n";

  TrainHooks hooks;
  hooks.on_epoch = [](const EpochRecord& record) {
    std::cout << "epoch " << record.epoch << "  loss " << record.loss << "  val_f1 "
              << record.val_f1 << "  (" << static_cast<long>(record.wall_ms) << " ms)\n";
  };
  hooks.on_best = [&](const Model& best, const EpochRecord&) {
    save_model(args.output, best);
  };

  const TrainHistory history = train(model, train_corpus, val_corpus, vocab, config, hooks);

  save_model(args.output, model);
  vocab.save(args.output + ".vocab");
  atomic_write_file(args.output + ".log.jsonl", history_to_jsonl(history));
  std::cout << "best epoch " << history.best_epoch << " with val_f1 " << history.best_val_f1
            << "; wrote " << args.output << "\n";
}

struct ExtractArgs {
  std::string input;
  std::string model;
  std::string output;
  std::string vocab;
  double threshold = 0.5;
};

void run_extract(const ExtractArgs& args) {
  if (args.threshold < 0.0 || args.threshold > 1.0) {
    throw ConfigError("threshold must lie in [0, 1]");
  }
  const Model model = load_model(args.model);
  const std::string vocab_path = args.vocab.empty() ? args.model + ".vocab" : args.vocab;
  const Vocab vocab = Vocab::load(vocab_path);
  if (vocab.size() != model.encoder.vocab) {
    throw Error(vocab_path + ": has " + std::to_string(vocab.size()) +
                " tokens but the model expects " + std::to_string(model.encoder.vocab));
  }
  RelationSet relations = model.relations;  // copy: input may add gold-only relations
  const Corpus corpus = load_corpus(args.input, relations, model.encoder.max_len, true);
  const auto predictions = extract_corpus(corpus, vocab, model, args.threshold);
  save_predictions(args.output, corpus, predictions);
  size_t total = 0;
  for (const auto& list : predictions) {
    total += list.size();
  }
  std::cout << "extracted " << total << " triple(s) over " << corpus.sentences.size()
            << " sentence(s); wrote " << args.output << "\n";
}

struct EvalArgs {
  std::string pred;
  std::string gold;
  std::string mode = "partial";
  std::string output;
};

void run_eval(const EvalArgs& args) {
  const MatchMode mode = parse_match_mode(args.mode);
  RelationSet relations;
  const Corpus gold = load_corpus(args.gold, relations, kNoTruncation, true);
  const Corpus pred = load_corpus(args.pred, relations, kNoTruncation, true);
  if (pred.sentences.size() != gold.sentences.size()) {
    throw Error("prediction and gold files differ in sentence count (" +
                std::to_string(pred.sentences.size()) + " vs " +
                std::to_string(gold.sentences.size()) + ")");
  }
  std::vector<std::vector<Triple>> preds(pred.sentences.size());
  for (size_t i = 0; i < pred.sentences.size(); ++i) {
    preds[i] = pred.sentences[i].triples;
  }
  const EvalReport report = evaluate_predictions(preds, gold, mode);
  std::cout << format_report(report);
  if (!args.output.empty()) {
    atomic_write_file(args.output, report_to_json(report));
    std::cout << "wrote " << args.output << "\n";
  }
}

struct StatsArgs {
  std::string input;
  std::string output;
};

void run_stats(const StatsArgs& args) {
  RelationSet relations;
  const Corpus corpus = load_corpus(args.input, relations, kNoTruncation, true);
  const CorpusStats stats = corpus_stats(corpus);
  std::cout << format_stats(stats);
  if (!args.output.empty()) {
    atomic_write_file(args.output, stats_to_json(stats));
    std::cout << "wrote " << args.output << "\n";
  }
}

struct SynthArgs {
  std::string output;
  SynthConfig config;
};

void run_synth(const SynthArgs& args) {
  const SynthResult result = generate_synthetic(args.config);
  save_corpus(args.output, result.corpus.sentences);
  std::cout << "wrote " << result.corpus.sentences.size() << " sentence(s) with "
            << result.relations.size() << " relation(s) to " << args.output << "\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"cascade binary tagging for relational triple extraction"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  app.set_config("--config", "", "INI file with option defaults; command-line flags win");
  bool serial = false;
  app.add_flag("--serial", serial, "run every kernel on its serial reference path");

  TrainArgs train_args;
  CLI::App* train_cmd = app.add_subcommand("train", "train a tagging model");
  train_cmd->add_option("--input", train_args.input, "training corpus (JSONL)")->required();
  train_cmd->add_option("--val", train_args.val,
                        "validation corpus (JSONL); defaults to the training corpus");
  train_cmd->add_option("--output", train_args.output, "checkpoint path to write")->required();
  train_cmd->add_option("--encoder", train_args.encoder, "encoder kind: transformer or bilstm")
      ->capture_default_str();
  train_cmd->add_option("--hidden", train_args.hidden, "token vector width")
      ->capture_default_str();
  train_cmd->add_option("--blocks", train_args.blocks, "encoder blocks / layers")
      ->capture_default_str();
  train_cmd->add_option("--heads", train_args.heads, "attention heads")->capture_default_str();
  train_cmd->add_option("--ffn", train_args.ffn, "transformer feed-forward width")
      ->capture_default_str();
  train_cmd->add_option("--max-len", train_args.max_len, "maximum sentence length in tokens")
      ->capture_default_str();
  train_cmd->add_option("--batch", train_args.config.batch_size, "mini-batch size")
      ->capture_default_str();
  train_cmd->add_option("--lr", train_args.config.lr, "Adam learning rate")
      ->capture_default_str();
  train_cmd->add_option("--threshold", train_args.config.threshold,
                        "tag threshold used for validation decoding")
      ->capture_default_str();
  train_cmd->add_option("--patience", train_args.config.patience,
                        "epochs without improvement before stopping")
      ->capture_default_str();
  train_cmd->add_option("--max-epochs", train_args.config.max_epochs, "epoch limit")
      ->capture_default_str();
  train_cmd->add_option("--seed", train_args.config.seed, "random seed")->capture_default_str();
  train_cmd->add_option("--subject-mode", train_args.subject_mode,
                        "object-loss subjects: all-subjects or sample-one")
      ->capture_default_str();
  train_cmd->callback([&] {
    kern::set_parallel(!serial);
    run_train(train_args);
  });

  ExtractArgs extract_args;
  CLI::App* extract_cmd = app.add_subcommand("extract", "extract triples with a trained model");
  extract_cmd->add_option("--input", extract_args.input, "corpus to decode (JSONL)")->required();
  extract_cmd->add_option("--model", extract_args.model, "checkpoint path")->required();
  extract_cmd->add_option("--output", extract_args.output, "predictions path (JSONL)")
      ->required();
  extract_cmd->add_option("--vocab", extract_args.vocab,
                          "vocabulary file; defaults to <model>.vocab");
  extract_cmd->add_option("--threshold", extract_args.threshold, "tag threshold")
      ->capture_default_str();
  extract_cmd->callback([&] {
    kern::set_parallel(!serial);
    run_extract(extract_args);
  });

  EvalArgs eval_args;
  CLI::App* eval_cmd = app.add_subcommand("eval", "score predictions against gold triples");
  eval_cmd->add_option("--pred", eval_args.pred, "predictions (JSONL)")->required();
  eval_cmd->add_option("--gold", eval_args.gold, "gold corpus (JSONL)")->required();
  eval_cmd->add_option("--mode", eval_args.mode, "match mode: partial or exact")
      ->capture_default_str();
  eval_cmd->add_option("--output", eval_args.output, "also write the report as JSON");
  eval_cmd->callback([&] {
    kern::set_parallel(!serial);
    run_eval(eval_args);
  });

  StatsArgs stats_args;
  CLI::App* stats_cmd = app.add_subcommand("stats", "corpus overlap and triple-count profile");
  stats_cmd->add_option("--input", stats_args.input, "corpus (JSONL)")->required();
  stats_cmd->add_option("--output", stats_args.output, "also write the profile as JSON");
  stats_cmd->callback([&] {
    kern::set_parallel(!serial);
    run_stats(stats_args);
  });

  SynthArgs synth_args;
  CLI::App* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus");
  synth_cmd->add_option("--output", synth_args.output, "corpus path to write (JSONL)")
      ->required();
  synth_cmd->add_option("--n", synth_args.config.sentences, "sentence count")
      ->capture_default_str();
  synth_cmd->add_option("--relations", synth_args.config.relations, "relation count")
      ->capture_default_str();
  synth_cmd->add_option("--vocab-budget", synth_args.config.vocab_budget,
                        "distinct surface tokens allowed")
      ->capture_default_str();
  synth_cmd->add_option("--normal", synth_args.config.normal_frac, "fraction of Normal sentences")
      ->capture_default_str();
  synth_cmd->add_option("--epo", synth_args.config.epo_frac, "fraction of EPO sentences")
      ->capture_default_str();
  synth_cmd->add_option("--seo", synth_args.config.seo_frac, "fraction of SEO sentences")
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth_args.config.seed, "random seed")->capture_default_str();
  synth_cmd->callback([&] {
    kern::set_parallel(!serial);
    run_synth(synth_args);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace tripex
