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

#include "tripex/corpus.hpp"

#include <set>
#include <sstream>

#include <json.hpp>

#include "tripex/util.hpp"

namespace tripex {

using nlohmann::json;

int RelationSet::add(const std::string& name) {
  auto it = ids.find(name);
  if (it != ids.end()) return it->second;
  const int id = static_cast<int>(names.size());
  names.push_back(name);
  ids[name] = id;
  return id;
}

int RelationSet::id_of(const std::string& name) const {
  auto it = ids.find(name);
  return it == ids.end() ? -1 : it->second;
}

bool locate_span(const std::vector<std::string>& tokens, const std::string& entity, Span* span) {
  const std::vector<std::string> needle = split_whitespace(entity);
  if (needle.empty() || needle.size() > tokens.size()) return false;
  const size_t last = tokens.size() - needle.size();
  for (size_t i = 0; i <= last; ++i) {
    bool hit = true;
    for (size_t j = 0; j < needle.size(); ++j) {
      if (tokens[i + j] != needle[j]) {
        hit = false;
        break;
      }
    }
    if (hit) {
      span->start = static_cast<int>(i);
      span->end = static_cast<int>(i + needle.size() - 1);
      return true;
    }
  }
  return false;
}

Sentence make_sentence(const std::string& text, const std::vector<Triple>& triples,
                       RelationSet& relations, int max_len, bool extend_relations,
                       int* dropped) {
  Sentence s;
  s.text = text;
  s.tokens = split_whitespace(text);
  if (static_cast<int>(s.tokens.size()) > max_len) {
    s.tokens.resize(static_cast<size_t>(max_len));
  }
  std::set<Triple> seen;
  for (const Triple& t : triples) {
    if (!seen.insert(t).second) continue;
    s.triples.push_back(t);
    int relation_id = relations.id_of(t.relation);
    if (relation_id < 0) {
      if (!extend_relations) throw Error("unknown relation '" + t.relation + "'");
      relation_id = relations.add(t.relation);
    }
    ResolvedTriple r;
    r.subject = t.subject;
    r.object = t.object;
    r.relation_id = relation_id;
    if (locate_span(s.tokens, t.subject, &r.subject_span) &&
        locate_span(s.tokens, t.object, &r.object_span)) {
      s.resolved.push_back(std::move(r));
    } else if (dropped != nullptr) {
      ++*dropped;
    }
  }
  return s;
}

namespace {

Triple parse_triple(const json& entry, const std::string& where) {
  if (!entry.is_array() || entry.size() != 3 || !entry[0].is_string() ||
      !entry[1].is_string() || !entry[2].is_string()) {
    throw Error(where + ": triple must be an array of three strings");
  }
  return {entry[0].get<std::string>(), entry[1].get<std::string>(), entry[2].get<std::string>()};
}

}  // namespace

Corpus load_corpus(const std::string& path, RelationSet& relations, int max_len,
                   bool extend_relations) {
  const std::string data = read_file(path);
  Corpus corpus;
  std::istringstream in(data);
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(where + ": " + e.what());
    }
    if (!record.is_object() || !record.contains("text") || !record["text"].is_string() ||
        !record.contains("triple_list") || !record["triple_list"].is_array()) {
      throw Error(where + ": expected {\"text\": ..., \"triple_list\": [...]}");
    }
    std::vector<Triple> triples;
    for (const json& entry : record["triple_list"]) triples.push_back(parse_triple(entry, where));
    try {
      corpus.sentences.push_back(make_sentence(record["text"].get<std::string>(), triples,
                                               relations, max_len, extend_relations,
                                               &corpus.dropped_triples));
    } catch (const Error& e) {
      throw Error(where + ": " + e.what());
    }
  }
  return corpus;
}

std::string corpus_to_jsonl(const std::vector<Sentence>& sentences) {
  std::string out;
  for (const Sentence& s : sentences) {
    json triple_list = json::array();
    for (const Triple& t : s.triples) {
      triple_list.push_back(json::array({t.subject, t.relation, t.object}));
    }
    out += json{{"text", s.text}, {"triple_list", triple_list}}.dump();
    out += '\n';
  }
  return out;
}

void save_corpus(const std::string& path, const std::vector<Sentence>& sentences) {
  atomic_write_file(path, corpus_to_jsonl(sentences));
}

OverlapFlags categorize_overlap(const std::vector<Triple>& triples) {
  OverlapFlags flags;
  auto pair_of = [](const Triple& t) {
    return t.subject <= t.object ? std::make_pair(t.subject, t.object)
                                 : std::make_pair(t.object, t.subject);
  };
  for (size_t i = 0; i < triples.size(); ++i) {
    for (size_t j = i + 1; j < triples.size(); ++j) {
      const bool same_pair = pair_of(triples[i]) == pair_of(triples[j]);
      const bool share = triples[i].subject == triples[j].subject ||
                         triples[i].subject == triples[j].object ||
                         triples[i].object == triples[j].subject ||
                         triples[i].object == triples[j].object;
      flags.epo = flags.epo || same_pair;
      flags.seo = flags.seo || (share && !same_pair);
    }
  }
  flags.normal = !(flags.epo || flags.seo);
  return flags;
}

int triple_bucket(size_t triple_count) {
  if (triple_count >= 5) return 5;
  return static_cast<int>(triple_count);
}

const char* const kBucketLabels[kBucketCount] = {"N=0", "N=1", "N=2", "N=3", "N=4", "N>=5"};

std::array<std::vector<int>, kBucketCount> bucket_by_triple_count(const Corpus& corpus) {
  std::array<std::vector<int>, kBucketCount> buckets;
  for (size_t i = 0; i < corpus.sentences.size(); ++i) {
    buckets[static_cast<size_t>(triple_bucket(corpus.sentences[i].triples.size()))].push_back(
        static_cast<int>(i));
  }
  return buckets;
}

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats stats;
  stats.all = static_cast<long>(corpus.sentences.size());
  for (const Sentence& s : corpus.sentences) {
    const OverlapFlags flags = categorize_overlap(s.triples);
    stats.normal += flags.normal ? 1 : 0;
    stats.epo += flags.epo ? 1 : 0;
    stats.seo += flags.seo ? 1 : 0;
    stats.by_count[static_cast<size_t>(triple_bucket(s.triples.size()))] += 1;
    for (const Triple& t : s.triples) stats.relation_histogram[t.relation] += 1;
  }
  return stats;
}

std::string format_stats(const CorpusStats& stats) {
  std::ostringstream out;
  out << "category   sentences\n";
  out << "--------   ---------\n";
  auto row = [&out](const char* label, long value) {
    out << label;
    for (size_t i = std::string(label).size(); i < 11; ++i) out << ' ';
    out << value << "\n";
  };
  row("Normal", stats.normal);
  row("EPO", stats.epo);
  row("SEO", stats.seo);
  row("ALL", stats.all);
  out << "\n";
  for (int b = 0; b < kBucketCount; ++b) {
    if (b == 0 && stats.by_count[0] == 0) continue;  // usually absent; report only if present
    row(kBucketLabels[b], stats.by_count[static_cast<size_t>(b)]);
  }
  out << "\nrelations: " << stats.relation_histogram.size() << "\n";
  return out.str();
}

std::string stats_to_json(const CorpusStats& stats) {
  json by_count = json::object();
  for (int b = 0; b < kBucketCount; ++b) {
    by_count[kBucketLabels[b]] = stats.by_count[static_cast<size_t>(b)];
  }
  json relations = json::object();
  for (const auto& [name, count] : stats.relation_histogram) relations[name] = count;
  return json{{"normal", stats.normal},
              {"epo", stats.epo},
              {"seo", stats.seo},
              {"all", stats.all},
              {"by_count", by_count},
              {"relations", relations}}
      .dump(2);
}

Vocab Vocab::build(const Corpus& corpus) {
  Vocab vocab;
  vocab.tokens = {kPadToken, kUnkToken};
  vocab.ids = {{kPadToken, kPadId}, {kUnkToken, kUnkId}};
  for (const Sentence& s : corpus.sentences) {
    for (const std::string& tok : s.tokens) {
      if (vocab.ids.emplace(tok, static_cast<int>(vocab.tokens.size())).second) {
        vocab.tokens.push_back(tok);
      }
    }
  }
  return vocab;
}

Vocab Vocab::load(const std::string& path) {
  const std::string data = read_file(path);
  Vocab vocab;
  std::istringstream in(data);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!vocab.ids.emplace(line, static_cast<int>(vocab.tokens.size())).second) {
      throw Error("vocabulary '" + path + "': duplicate token '" + line + "'");
    }
    vocab.tokens.push_back(line);
  }
  if (vocab.size() < 2 || vocab.tokens[kPadId] != kPadToken ||
      vocab.tokens[kUnkId] != kUnkToken) {
    throw Error("vocabulary '" + path + "': first lines must be " + std::string(kPadToken) +
                " and " + kUnkToken);
  }
  return vocab;
}

void Vocab::save(const std::string& path) const {
  std::string out;
  for (const std::string& tok : tokens) {
    out += tok;
    out += '\n';
  }
  atomic_write_file(path, out);
}

int Vocab::id_of(const std::string& token) const {
  auto it = ids.find(token);
  return it == ids.end() ? kUnkId : it->second;
}

std::vector<int> Vocab::encode(const std::vector<std::string>& toks) const {
  std::vector<int> out(toks.size());
  for (size_t i = 0; i < toks.size(); ++i) out[i] = id_of(toks[i]);
  return out;
}

}  // namespace tripex
