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

#include "qobf/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "qobf/error.hpp"
#include "qobf/preprocess.hpp"

namespace qobf::oracle {
namespace {

double Dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double Distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(sum);
}

double Cosine(std::span<const double> a, std::span<const double> b) {
  const double denom = std::sqrt(Dot(a, a)) * std::sqrt(Dot(b, b));
  if (denom == 0.0) return 0.0;
  return std::clamp(Dot(a, b) / denom, -1.0, 1.0);
}

std::size_t Count(std::span<const std::string> tokens, const std::string& term) {
  return static_cast<std::size_t>(std::count(tokens.begin(), tokens.end(), term));
}

std::optional<std::vector<double>> Mean(std::span<const std::string> tokens,
                                        const EmbeddingStore& store) {
  std::vector<double> sum(store.dimension(), 0.0);
  std::size_t found = 0;
  for (const auto& t : tokens) {
    if (!store.Contains(t)) continue;
    const auto v = store.Vector(t);
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += v[i];
    ++found;
  }
  if (found == 0) return std::nullopt;
  for (double& x : sum) x /= static_cast<double>(found);
  return sum;
}

RunList ToRun(const std::vector<std::string>& ids, const std::vector<double>& scores,
              bool drop_zero, std::size_t top, std::string_view query_id,
              std::string_view tag) {
  std::vector<std::pair<std::string, double>> scored;
  for (std::size_t d = 0; d < ids.size(); ++d) {
    if (std::isnan(scores[d])) continue;
    if (drop_zero && !(scores[d] > 0.0)) continue;
    scored.emplace_back(ids[d], scores[d]);
  }
  return MakeRun(query_id, tag, std::move(scored), top);
}

}  // namespace

double Similarity(std::span<const double> a, std::span<const double> b,
                  SimilarityMeasure measure) {
  switch (measure) {
    case SimilarityMeasure::kAngle:
      return Cosine(a, b);
    case SimilarityMeasure::kDistance:
      return 1.0 / (1.0 + Distance(a, b));
    case SimilarityMeasure::kProduct:
      return Cosine(a, b) * (1.0 / (1.0 + Distance(a, b)));
  }
  return 0.0;
}

std::vector<ScoredWord> RankBySimilarity(const EmbeddingStore& store,
                                         std::string_view probe,
                                         SimilarityMeasure measure,
                                         std::size_t count) {
  const auto p = store.Vector(probe);
  std::vector<double> key(store.size());
  std::vector<double> score(store.size());
  for (std::size_t i = 0; i < store.size(); ++i) {
    score[i] = Similarity(p, store.Vector(i), measure);
    key[i] = measure == SimilarityMeasure::kDistance ? -Distance(p, store.Vector(i))
                                                     : score[i];
  }
  std::vector<bool> taken(store.size(), false);
  std::vector<ScoredWord> out;
  for (std::size_t r = 0; r < std::min(count, store.size()); ++r) {
    std::size_t best = store.size();
    for (std::size_t i = 0; i < store.size(); ++i) {
      if (taken[i]) continue;
      if (best == store.size() || key[i] > key[best] ||
          (key[i] == key[best] && store.word(i) < store.word(best))) {
        best = i;
      }
    }
    taken[best] = true;
    out.push_back({store.word(best), score[best]});
  }
  return out;
}

BoxWords SortAndSlice(const EmbeddingStore& store, std::string_view probe,
                      std::size_t k, std::size_t n, SimilarityMeasure measure) {
  const auto all = RankBySimilarity(store, probe, measure, store.size());
  BoxWords box;
  for (std::size_t i = 0; i < all.size() && i < k + n; ++i) {
    (i < k ? box.safe_box : box.candidates).push_back(all[i].word);
  }
  return box;
}

CandidateBox BuildBoxes(std::string_view probe, const MechanismConfig& config,
                        const EmbeddingStore& store) {
  config.Validate(store.size());
  const auto ranking = RankBySimilarity(store, probe, config.measure, store.size());
  return BoxFromRanking(probe, config, ranking);
}

std::vector<double> Bm25Scores(const std::vector<std::vector<std::string>>& docs,
                               std::span<const std::string> query,
                               const Bm25Params& params) {
  double total_length = 0.0;
  for (const auto& d : docs) total_length += static_cast<double>(d.size());
  const double average = total_length / static_cast<double>(docs.size());
  const double n = static_cast<double>(docs.size());
  std::vector<double> scores(docs.size(), 0.0);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const auto& term : query) {
      double df = 0.0;
      for (const auto& other : docs) df += Count(other, term) > 0 ? 1.0 : 0.0;
      const double tf = static_cast<double>(Count(docs[d], term));
      if (tf == 0.0) continue;
      const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
      const double norm = 1.0 - params.b +
                          params.b * static_cast<double>(docs[d].size()) / average;
      scores[d] += idf * tf * (params.k1 + 1.0) / (tf + params.k1 * norm);
    }
  }
  return scores;
}

std::vector<double> TfidfScores(const std::vector<std::vector<std::string>>& docs,
                                std::span<const std::string> query) {
  std::set<std::string> vocabulary;
  for (const auto& d : docs) vocabulary.insert(d.begin(), d.end());
  const double n = static_cast<double>(docs.size());
  const auto weights = [&](std::span<const std::string> tokens) {
    std::vector<double> w;
    for (const auto& term : vocabulary) {
      double df = 0.0;
      for (const auto& d : docs) df += Count(d, term) > 0 ? 1.0 : 0.0;
      const double tf = static_cast<double>(Count(tokens, term));
      w.push_back(tf > 0.0 ? (1.0 + std::log(tf)) * std::log(n / df) : 0.0);
    }
    return w;
  };
  const auto q = weights(query);
  std::vector<double> scores(docs.size(), 0.0);
  for (std::size_t d = 0; d < docs.size(); ++d) scores[d] = Cosine(q, weights(docs[d]));
  return scores;
}

std::vector<double> EmbeddingScores(const std::vector<std::vector<std::string>>& docs,
                                    std::span<const std::string> query,
                                    const EmbeddingStore& store) {
  const auto q = Mean(query, store);
  if (!q) Fail(ErrorCode::kInvalidArgument, "query has no in-vocabulary token");
  std::vector<double> scores(docs.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    if (const auto v = Mean(docs[d], store)) scores[d] = Cosine(*q, *v);
  }
  return scores;
}

double Ndcg(std::span<const int> ranked_grades, std::vector<int> all_grades,
            std::size_t cutoff) {
  double dcg = 0.0;
  for (std::size_t i = 0; i < ranked_grades.size() && i < cutoff; ++i) {
    dcg += (std::pow(2.0, ranked_grades[i]) - 1.0) / std::log2(2.0 + static_cast<double>(i));
  }
  std::sort(all_grades.begin(), all_grades.end(), std::greater<>());
  double ideal = 0.0;
  for (std::size_t i = 0; i < all_grades.size() && i < cutoff; ++i) {
    ideal += (std::pow(2.0, all_grades[i]) - 1.0) / std::log2(2.0 + static_cast<double>(i));
  }
  if (ideal == 0.0) Fail(ErrorCode::kUndefinedMetric, "no relevant documents");
  return dcg / ideal;
}

BruteForceCorpus::BruteForceCorpus(const std::vector<Document>& documents,
                                   const EmbeddingStore* store)
    : store_(store) {
  if (documents.empty()) Fail(ErrorCode::kInvalidArgument, "cannot index an empty corpus");
  for (const auto& doc : documents) {
    if (std::find(ids_.begin(), ids_.end(), doc.id) != ids_.end()) {
      Fail(ErrorCode::kDuplicate, "duplicate doc id '" + doc.id + "'");
    }
    ids_.push_back(doc.id);
    docs_.push_back(NormalizeAndTokenize(doc.text));
  }
}

RunList BruteForceCorpus::Bm25Search(std::span<const std::string> query,
                                     const Bm25Params& params, std::size_t top,
                                     std::string_view query_id,
                                     std::string_view tag) const {
  return ToRun(ids_, Bm25Scores(docs_, query, params), true, top, query_id, tag);
}

RunList BruteForceCorpus::TfidfSearch(std::span<const std::string> query,
                                      std::size_t top, std::string_view query_id,
                                      std::string_view tag) const {
  return ToRun(ids_, TfidfScores(docs_, query), true, top, query_id, tag);
}

RunList BruteForceCorpus::EmbeddingSearch(std::span<const std::string> query,
                                          std::size_t top, std::string_view query_id,
                                          std::string_view tag) const {
  if (store_ == nullptr) Fail(ErrorCode::kInvalidArgument, "no embeddings attached");
  return ToRun(ids_, EmbeddingScores(docs_, query, *store_), false, top, query_id, tag);
}

RunList BruteForceCorpus::Rerank(const std::set<std::string>& pool,
                                 std::span<const std::string> original_query,
                                 std::string_view query_id,
                                 std::string_view tag) const {
  if (pool.empty()) return MakeRun(query_id, tag, {}, 0);
  if (store_ == nullptr) Fail(ErrorCode::kInvalidArgument, "no embeddings attached");
  const auto scores = EmbeddingScores(docs_, original_query, *store_);
  std::vector<std::pair<std::string, double>> scored;
  for (std::size_t d = 0; d < ids_.size(); ++d) {
    if (!pool.contains(ids_[d])) continue;
    scored.emplace_back(ids_[d], std::isnan(scores[d]) ? 0.0 : scores[d]);
  }
  const std::size_t keep = scored.size();
  return MakeRun(query_id, tag, std::move(scored), keep);
}

}  // namespace qobf::oracle
