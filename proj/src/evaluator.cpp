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

#include "tripex/evaluator.hpp"

#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "tripex/util.hpp"

namespace tripex {
namespace {

// Separates key fields so ("a b", "c") and ("a", "b c") cannot collide.
constexpr char kKeySep = '\x1f';

std::string entity_key(const std::string& entity, MatchMode mode) {
  return mode == MatchMode::kPartial ? first_token(entity) : entity;
}

// One-to-one matching of key multisets: each prediction, in order, consumes
// the first not-yet-matched gold with an equal key.
MicroCounts greedy_match(const std::vector<std::string>& pred_keys,
                         const std::vector<std::string>& gold_keys) {
  std::vector<bool> used(gold_keys.size(), false);
  MicroCounts counts;
  for (const std::string& key : pred_keys) {
    bool matched = false;
    for (size_t i = 0; i < gold_keys.size(); ++i) {
      if (!used[i] && gold_keys[i] == key) {
        used[i] = true;
        matched = true;
        break;
      }
    }
    if (matched) {
      ++counts.tp;
    } else {
      ++counts.fp;
    }
  }
  for (bool u : used) {
    if (!u) {
      ++counts.fn;
    }
  }
  return counts;
}

MicroCounts match_pattern(const std::vector<Triple>& pred, const std::vector<Triple>& gold,
                          ElementPattern pattern, MatchMode mode) {
  std::vector<std::string> pred_keys;
  pred_keys.reserve(pred.size());
  for (const Triple& t : pred) {
    pred_keys.push_back(element_key(t, pattern, mode));
  }
  std::vector<std::string> gold_keys;
  gold_keys.reserve(gold.size());
  for (const Triple& t : gold) {
    gold_keys.push_back(element_key(t, pattern, mode));
  }
  return greedy_match(pred_keys, gold_keys);
}

void finish(GroupReport& group) {
  group.score = score_from_counts(group.counts);
}

nlohmann::json group_to_json(const GroupReport& group) {
  if (!group.present) {
    return nullptr;
  }
  return {{"sentences", group.sentences}, {"tp", group.counts.tp},
          {"fp", group.counts.fp},        {"fn", group.counts.fn},
          {"precision", group.score.precision}, {"recall", group.score.recall},
          {"f1", group.score.f1}};
}

void append_row(std::ostringstream& os, const GroupReport& group) {
  os << std::left << std::setw(12) << group.label << std::right;
  if (!group.present) {
    for (int i = 0; i < 4; ++i) {
      os << std::setw(8) << "-";
    }
    for (int i = 0; i < 3; ++i) {
      os << std::setw(12) << "-";
    }
    os << '\n';
    return;
  }
  os << std::setw(8) << group.sentences << std::setw(8) << group.counts.tp << std::setw(8)
     << group.counts.fp << std::setw(8) << group.counts.fn;
  os << std::fixed << std::setprecision(4);
  os << std::setw(12) << group.score.precision << std::setw(12) << group.score.recall
     << std::setw(12) << group.score.f1 << '\n';
  os.unsetf(std::ios::fixed);
  os << std::setprecision(6);
}

void append_header(std::ostringstream& os) {
  os << std::left << std::setw(12) << "group" << std::right << std::setw(8) << "sents"
     << std::setw(8) << "tp" << std::setw(8) << "fp" << std::setw(8) << "fn" << std::setw(12)
     << "precision" << std::setw(12) << "recall" << std::setw(12) << "f1" << '\n';
}

}  // namespace

const char* match_mode_name(MatchMode mode) {
  return mode == MatchMode::kPartial ? "partial" : "exact";
}

MatchMode parse_match_mode(const std::string& name) {
  if (name == "partial") {
    return MatchMode::kPartial;
  }
  if (name == "exact") {
    return MatchMode::kExact;
  }
  throw ConfigError("unknown match mode \"" + name + "\" (expected partial or exact)");
}

std::string first_token(const std::string& text) {
  std::vector<std::string> tokens = split_whitespace(text);
  return tokens.empty() ? std::string() : tokens.front();
}

const char* element_pattern_name(ElementPattern pattern) {
  switch (pattern) {
    case ElementPattern::kE1:
      return "E1";
    case ElementPattern::kE2:
      return "E2";
    case ElementPattern::kR:
      return "R";
    case ElementPattern::kE1R:
      return "(E1,R)";
    case ElementPattern::kRE2:
      return "(R,E2)";
    case ElementPattern::kE1E2:
      return "(E1,E2)";
    case ElementPattern::kE1RE2:
      return "(E1,R,E2)";
  }
  return "?";
}

std::string element_key(const Triple& triple, ElementPattern pattern, MatchMode mode) {
  std::string key;
  auto add = [&key](const std::string& part) {
    key += part;
    key += kKeySep;
  };
  switch (pattern) {
    case ElementPattern::kE1:
      add(entity_key(triple.subject, mode));
      break;
    case ElementPattern::kE2:
      add(entity_key(triple.object, mode));
      break;
    case ElementPattern::kR:
      add(triple.relation);
      break;
    case ElementPattern::kE1R:
      add(entity_key(triple.subject, mode));
      add(triple.relation);
      break;
    case ElementPattern::kRE2:
      add(triple.relation);
      add(entity_key(triple.object, mode));
      break;
    case ElementPattern::kE1E2:
      add(entity_key(triple.subject, mode));
      add(entity_key(triple.object, mode));
      break;
    case ElementPattern::kE1RE2:
      add(entity_key(triple.subject, mode));
      add(triple.relation);
      add(entity_key(triple.object, mode));
      break;
  }
  return key;
}

bool triple_match(const Triple& pred, const Triple& gold, MatchMode mode) {
  return element_key(pred, ElementPattern::kE1RE2, mode) ==
         element_key(gold, ElementPattern::kE1RE2, mode);
}

Score score_from_counts(const MicroCounts& counts) {
  Score score;
  const double p_den = static_cast<double>(counts.tp + counts.fp);
  const double r_den = static_cast<double>(counts.tp + counts.fn);
  score.precision = p_den > 0 ? static_cast<double>(counts.tp) / p_den : 0.0;
  score.recall = r_den > 0 ? static_cast<double>(counts.tp) / r_den : 0.0;
  const double sum = score.precision + score.recall;
  score.f1 = sum > 0 ? 2.0 * score.precision * score.recall / sum : 0.0;
  return score;
}

MicroCounts match_sentence(const std::vector<Triple>& pred, const std::vector<Triple>& gold,
                           MatchMode mode) {
  return match_pattern(pred, gold, ElementPattern::kE1RE2, mode);
}

Score score_micro(const std::vector<std::vector<Triple>>& preds,
                  const std::vector<std::vector<Triple>>& golds, MatchMode mode) {
  if (preds.size() != golds.size()) {
    throw Error("score_micro: " + std::to_string(preds.size()) + " prediction lists but " +
                std::to_string(golds.size()) + " gold lists");
  }
  MicroCounts counts;
  for (size_t i = 0; i < preds.size(); ++i) {
    counts += match_sentence(preds[i], golds[i], mode);
  }
  return score_from_counts(counts);
}

EvalReport evaluate_predictions(const std::vector<std::vector<Triple>>& preds,
                                const Corpus& gold, MatchMode mode) {
  if (preds.size() != gold.sentences.size()) {
    throw Error("evaluate_predictions: " + std::to_string(preds.size()) +
                " prediction lists but " + std::to_string(gold.sentences.size()) +
                " gold sentences");
  }
  EvalReport report;
  report.mode = mode;
  report.sentences = static_cast<long>(preds.size());

  auto labeled = [](const std::string& label) {
    GroupReport group;
    group.label = label;
    return group;
  };
  report.by_overlap = {labeled("Normal"), labeled("EPO"), labeled("SEO")};
  for (int b = 1; b < kBucketCount; ++b) {
    report.by_count.push_back(labeled(kBucketLabels[b]));
  }
  for (ElementPattern pattern : kElementPatterns) {
    report.by_element.push_back(labeled(element_pattern_name(pattern)));
  }

  for (size_t i = 0; i < preds.size(); ++i) {
    const Sentence& sentence = gold.sentences[i];
    const MicroCounts counts = match_sentence(preds[i], sentence.triples, mode);
    report.overall_counts += counts;

    const OverlapFlags flags = categorize_overlap(sentence.triples);
    const bool in_group[3] = {flags.normal, flags.epo, flags.seo};
    for (int g = 0; g < 3; ++g) {
      if (in_group[g]) {
        report.by_overlap[g].present = true;
        ++report.by_overlap[g].sentences;
        report.by_overlap[g].counts += counts;
      }
    }

    const int bucket = triple_bucket(static_cast<int>(sentence.triples.size()));
    if (bucket >= 1) {
      GroupReport& row = report.by_count[bucket - 1];
      row.present = true;
      ++row.sentences;
      row.counts += counts;
    }

    for (size_t e = 0; e < kElementPatterns.size(); ++e) {
      GroupReport& row = report.by_element[e];
      row.present = true;
      ++row.sentences;
      row.counts += match_pattern(preds[i], sentence.triples, kElementPatterns[e], mode);
    }
  }

  report.overall = score_from_counts(report.overall_counts);
  for (GroupReport& group : report.by_overlap) {
    finish(group);
  }
  for (GroupReport& group : report.by_count) {
    finish(group);
  }
  for (GroupReport& group : report.by_element) {
    finish(group);
  }
  return report;
}

std::string format_report(const EvalReport& report) {
  std::ostringstream os;
  os << "match mode: " << match_mode_name(report.mode) << '\n';
  GroupReport all;
  all.label = "ALL";
  all.sentences = report.sentences;
  all.counts = report.overall_counts;
  all.score = report.overall;
  all.present = true;

  append_header(os);
  append_row(os, all);
  for (const GroupReport& group : report.by_overlap) {
    append_row(os, group);
  }
  for (const GroupReport& group : report.by_count) {
    append_row(os, group);
  }
  os << '\n' << "element analysis\n";
  append_header(os);
  for (const GroupReport& group : report.by_element) {
    append_row(os, group);
  }
  return os.str();
}

std::string report_to_json(const EvalReport& report) {
  nlohmann::json j;
  j["mode"] = match_mode_name(report.mode);
  j["sentences"] = report.sentences;
  GroupReport all;
  all.sentences = report.sentences;
  all.counts = report.overall_counts;
  all.score = report.overall;
  all.present = true;
  j["overall"] = group_to_json(all);
  for (const GroupReport& group : report.by_overlap) {
    j["by_overlap"][group.label] = group_to_json(group);
  }
  for (const GroupReport& group : report.by_count) {
    j["by_count"][group.label] = group_to_json(group);
  }
  for (const GroupReport& group : report.by_element) {
    j["by_element"][group.label] = group_to_json(group);
  }
  return j.dump(2) + "\n";
}

}  // namespace tripex
