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

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include "tripex/corpus.hpp"
#include "tripex/model.hpp"
#include "tripex/util.hpp"
#include "temp_dir.hpp"

namespace tripex {
namespace {

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("tripex");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

long count_lines(const std::string& path) {
  const std::string content = read_file(path);
  return std::count(content.begin(), content.end(), '\n');
}

}  // namespace

TEST_CASE("help requests exit cleanly") {
  CHECK(run({"--help"}) == 0);
  CHECK(run({"synth", "--help"}) == 0);
}

TEST_CASE("usage errors exit with status two") {
  CHECK(run({}) == 2);                                  // a subcommand is required
  CHECK(run({"frobnicate"}) == 2);                      // unknown subcommand
  CHECK(run({"synth", "--no-such-flag"}) == 2);         // unknown flag
  CHECK(run({"train"}) == 2);                           // missing required options
  CHECK(run({"eval", "--pred", "x", "--gold", "y", "--mode", "fuzzy"}) == 2);
}

TEST_CASE("runtime failures exit with status one") {
  TempDir dir("cli_fail");
  CHECK(run({"stats", "--input", dir.file("absent.jsonl")}) == 1);
  CHECK(run({"extract", "--input", dir.file("absent.jsonl"), "--model", dir.file("no.ckpt"),
             "--output", dir.file("out.jsonl")}) == 1);
}

TEST_CASE("out-of-range options are configuration errors") {
  TempDir dir("cli_config");
  const std::string corpus = dir.file("c.jsonl");
  CHECK(run({"synth", "--output", corpus, "--n", "4", "--relations", "2", "--seed", "3"}) == 0);
  // Threshold outside [0, 1] is rejected before any model loading.
  CHECK(run({"extract", "--input", corpus, "--model", dir.file("no.ckpt"), "--output",
             dir.file("p.jsonl"), "--threshold", "1.5"}) == 2);
  // An infeasible mix is also a configuration error.
  CHECK(run({"synth", "--output", dir.file("d.jsonl"), "--n", "4", "--relations", "1",
             "--epo", "0.5", "--normal", "0.5", "--seo", "0.0"}) == 2);
}

TEST_CASE("synthetic generation is deterministic at the file level") {
  TempDir dir("cli_synth");
  const std::string a = dir.file("a.jsonl");
  const std::string b = dir.file("b.jsonl");
  const std::vector<std::string> flags = {"--n", "10", "--relations", "3", "--seed", "17"};

  std::vector<std::string> run_a = {"synth", "--output", a};
  run_a.insert(run_a.end(), flags.begin(), flags.end());
  std::vector<std::string> run_b = {"synth", "--output", b};
  run_b.insert(run_b.end(), flags.begin(), flags.end());

  REQUIRE(run(run_a) == 0);
  REQUIRE(run(run_b) == 0);
  CHECK(read_file(a) == read_file(b));
  CHECK(count_lines(a) == 10);
}

TEST_CASE("a config file supplies defaults that flags override") {
  TempDir dir("cli_ini");
  const std::string ini = dir.file("defaults.ini");
  atomic_write_file(ini, "[synth]\nn=7\nrelations=2\nseed=5\n");

  const std::string from_ini = dir.file("from_ini.jsonl");
  REQUIRE(run({"--config", ini, "synth", "--output", from_ini}) == 0);
  CHECK(count_lines(from_ini) == 7);

  // An explicit flag beats the file.
  const std::string overridden = dir.file("overridden.jsonl");
  REQUIRE(run({"--config", ini, "synth", "--output", overridden, "--n", "3"}) == 0);
  CHECK(count_lines(overridden) == 3);
}

TEST_CASE("the full pipeline runs end to end") {
  TempDir dir("cli_e2e");
  const std::string corpus = dir.file("train.jsonl");
  const std::string model = dir.file("model.ckpt");
  const std::string predictions = dir.file("pred.jsonl");
  const std::string report = dir.file("report.json");
  const std::string stats = dir.file("stats.json");

  REQUIRE(run({"synth", "--output", corpus, "--n", "8", "--relations", "2", "--vocab-budget",
               "40", "--seed", "9"}) == 0);
  REQUIRE(run({"stats", "--input", corpus, "--output", stats}) == 0);
  CHECK(read_file(stats).find("\"all\"") != std::string::npos);

  // A deliberately tiny model: the embedding alone, two epochs.
  REQUIRE(run({"train", "--input", corpus, "--output", model, "--hidden", "8", "--blocks", "0",
               "--max-epochs", "2", "--patience", "2", "--seed", "4"}) == 0);
  CHECK(std::filesystem::exists(model));
  CHECK(std::filesystem::exists(model + ".meta.json"));
  CHECK(std::filesystem::exists(model + ".vocab"));
  CHECK(count_lines(model + ".log.jsonl") == 2);

  // The checkpoint reloads as a usable model with the trained shape.
  const Model reloaded = load_model(model);
  CHECK(reloaded.encoder.hidden == 8);
  CHECK(reloaded.relations.size() == 2);

  REQUIRE(run({"extract", "--input", corpus, "--model", model, "--output", predictions,
               "--serial"}) == 0);
  CHECK(count_lines(predictions) == 8);

  REQUIRE(run({"eval", "--pred", predictions, "--gold", corpus, "--mode", "partial",
               "--output", report}) == 0);
  const std::string json = read_file(report);
  CHECK(json.find("\"overall\"") != std::string::npos);
  CHECK(json.find("\"mode\"") != std::string::npos);

  // Exact mode accepts the same inputs.
  REQUIRE(run({"eval", "--pred", predictions, "--gold", corpus, "--mode", "exact"}) == 0);

  // Prediction/gold sentence count mismatches are runtime errors.
  const std::string short_gold = dir.file("short.jsonl");
  REQUIRE(run({"synth", "--output", short_gold, "--n", "3", "--relations", "2", "--seed",
               "9"}) == 0);
  CHECK(run({"eval", "--pred", predictions, "--gold", short_gold}) == 1);
}

}  // namespace tripex
