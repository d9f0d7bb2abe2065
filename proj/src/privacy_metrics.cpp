//
// Copyright 2026 The qobf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "qobf/privacy_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <unordered_map>
#include <utility>

#include "qobf/error.hpp"

namespace qobf {

double Jaccard(std::span<const std::string> original,
               std::span<const std::string> obfuscated) {
  const std::set<std::string> a(original.begin(), original.end());
  const std::set<std::string> b(obfuscated.begin(), obfuscated.end());
  if (a.empty() && b.empty()) return 1.0;
  std::size_t shared = 0;
  for (const auto& word : a) shared += b.contains(word) ? 1 : 0;
  return static_cast<double>(shared) /
         static_cast<double>(a.size() + b.size() - shared);
}

double TargetJaccard(const ObfuscationResult& result) {
  std::set<std::pair<std::size_t, std::string>> before;
  std::set<std::pair<std::size_t, std::string>> after;
  for (std::size_t i = 0; i < result.original.tokens.size(); ++i) {
    if (!result.original.tokens[i].target) continue;
    before.emplace(i, result.original.tokens[i].surface);
    after.emplace(i, result.tokens[i]);
  }
  if (before.empty()) return 1.0;
  std::size_t shared = 0;
  for (const auto& item : before) shared += after.contains(item) ? 1 : 0;
  return static_cast<double>(shared) /
         static_cast<double>(before.size() + after.size() - shared);
}

double SemanticSimilarity(std::span<const std::string> original,
                          std::span<const std::string> obfuscated,
                          const EmbeddingStore& store) {
  const auto a = store.MeanVector(original);
  const auto b = store.MeanVector(obfuscated);
  if (!a || !b) {
    Fail(ErrorCode::kUndefinedMetric,
         "semantic similarity needs an in-vocabulary token on both sides");
  }
  try {
    return CosineSimilarity(*a, *b);
  } catch (const Error& e) {
    Fail(ErrorCode::kUndefinedMetric, e.what());
  }
}

double EstimateFailureRate(std::string_view word, const Mechanism& mechanism,
                           std::size_t trials, RandomStream& rng) {
  if (trials == 0) Fail(ErrorCode::kInvalidArgument, "trials must be >= 1");
  std::size_t failures = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    failures += mechanism.ObfuscateWord(word, rng) == word ? 1 : 0;
  }
  return static_cast<double>(failures) / static_cast<double>(trials);
}

std::size_t EstimateSupportSize(std::string_view word, const Mechanism& mechanism,
                                double eta, std::size_t trials, RandomStream& rng) {
  if (!(eta > 0.0 && eta < 1.0)) Fail(ErrorCode::kInvalidArgument, "eta must lie in (0, 1)");
  if (static_cast<double>(trials) < 100.0 / eta) {
    Fail(ErrorCode::kInvalidArgument,
         "need at least 100 / eta trials to resolve the tail mass");
  }
  std::unordered_map<std::string, std::size_t> counts;
  for (std::size_t t = 0; t < trials; ++t) ++counts[mechanism.ObfuscateWord(word, rng)];
  std::vector<std::size_t> sorted;
  for (const auto& [_, c] : counts) sorted.push_back(c);
  std::sort(sorted.rbegin(), sorted.rend());
  const double needed = (1.0 - eta) * static_cast<double>(trials);
  std::size_t covered = 0;
  std::size_t size = 0;
  for (std::size_t c : sorted) {
    covered += c;
    ++size;
    if (static_cast<double>(covered) >= needed) break;
  }
  return size;
}

Summary Summarize(std::span<const double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  double total = 0.0;
  for (double v : values) total += v;
  s.mean = total / static_cast<double>(s.count);
  if (s.count > 1) {
    double squares = 0.0;
    for (double v : values) squares += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(squares / static_cast<double>(s.count - 1));
  }
  return s;
}

PrivacyRecord ScoreReplicates(std::string_view query_id, std::string_view mechanism,
                              double epsilon,
                              std::span<const ObfuscationResult> replicates,
                              const EmbeddingStore& store) {
  PrivacyRecord record;
  record.query_id = std::string(query_id);
  record.mechanism = std::string(mechanism);
  record.epsilon = epsilon;
  record.replicates = replicates.size();
  if (replicates.empty()) return record;
  double jaccard = 0.0;
  double target = 0.0;
  double semantic = 0.0;
  bool semantic_defined = true;
  for (const auto& r : replicates) {
    const auto original = r.original.Surfaces();
    jaccard += Jaccard(original, r.tokens);
    target += TargetJaccard(r);
    if (semantic_defined) {
      try {
        semantic += SemanticSimilarity(original, r.tokens, store);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kUndefinedMetric) throw;
        semantic_defined = false;
      }
    }
  }
  const double count = static_cast<double>(replicates.size());
  record.jaccard = jaccard / count;
  record.target_jaccard = target / count;
  if (semantic_defined) record.semantic_similarity = semantic / count;
  return record;
}

void PrivacyReport::Aggregate() {
  aggregates.clear();
  std::map<std::pair<std::string, double>, std::size_t> slot;
  std::vector<std::vector<const PrivacyRecord*>> groups;
  for (const auto& r : records) {
    const auto key = std::make_pair(r.mechanism, r.epsilon);
    auto [it, inserted] = slot.emplace(key, groups.size());
    if (inserted) {
      groups.emplace_back();
      aggregates.push_back({r.mechanism, r.epsilon, {}, {}, {}});
    }
    groups[it->second].push_back(&r);
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::vector<double> jaccard, target, semantic;
    for (const auto* r : groups[g]) {
      jaccard.push_back(r->jaccard);
      target.push_back(r->target_jaccard);
      if (r->semantic_similarity) semantic.push_back(*r->semantic_similarity);
    }
    aggregates[g].jaccard = Summarize(jaccard);
    aggregates[g].target_jaccard = Summarize(target);
    aggregates[g].semantic_similarity = Summarize(semantic);
  }
}

std::string PrivacyReport::RecordsTsv() const {
  std::string out =
      "qid\tmechanism\tepsilon\treplicates\tjaccard\ttarget_jaccard\tsemantic\n";
  for (const auto& r : records) {
    out += fmt::format("{}\t{}\t{:g}\t{}\t{:.6f}\t{:.6f}\t{}\n", r.query_id,
                       r.mechanism, r.epsilon, r.replicates, r.jaccard,
                       r.target_jaccard,
                       r.semantic_similarity
                           ? fmt::format("{:.6f}", *r.semantic_similarity)
                           : std::string("nan"));
  }
  return out;
}

std::string PrivacyReport::AggregatesTsv() const {
  std::string out =
      "mechanism\tepsilon\tqueries\tjaccard_mean\tjaccard_std\t"
      "target_jaccard_mean\tsemantic_mean\tsemantic_std\n";
  for (const auto& a : aggregates) {
    out += fmt::format("{}\t{:g}\t{}\t{:.6f}\t{:.6f}\t{:.6f}\t{:.6f}\t{:.6f}\n",
                       a.mechanism, a.epsilon, a.jaccard.count, a.jaccard.mean,
                       a.jaccard.stddev, a.target_jaccard.mean,
                       a.semantic_similarity.mean, a.semantic_similarity.stddev);
  }
  return out;
}

std::string PrivacyReport::ToJson() const {
  nlohmann::ordered_json doc;
  auto& recs = doc["records"] = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json row = {{"qid", r.query_id},
                                  {"mechanism", r.mechanism},
                                  {"epsilon", r.epsilon},
                                  {"replicates", r.replicates},
                                  {"jaccard", r.jaccard},
                                  {"target_jaccard", r.target_jaccard}};
    row["semantic"] = r.semantic_similarity ? nlohmann::ordered_json(*r.semantic_similarity)
                                            : nlohmann::ordered_json(nullptr);
    recs.push_back(std::move(row));
  }
  auto& aggs = doc["aggregates"] = nlohmann::ordered_json::array();
  const auto summary = [](const Summary& s) {
    return nlohmann::ordered_json{{"count", s.count}, {"mean", s.mean}, {"stddev", s.stddev}};
  };
  for (const auto& a : aggregates) {
    aggs.push_back({{"mechanism", a.mechanism},
                    {"epsilon", a.epsilon},
                    {"jaccard", summary(a.jaccard)},
                    {"target_jaccard", summary(a.target_jaccard)},
                    {"semantic", summary(a.semantic_similarity)}});
  }
  return doc.dump(2) + "\n";
}

}  // namespace qobf
