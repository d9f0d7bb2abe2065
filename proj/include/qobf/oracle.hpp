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

#ifndef QOBF_ORACLE_HPP_
#define QOBF_ORACLE_HPP_

// Brute-force reference implementations. They share no code path with the
// ranking, indexing and scoring routines they check: every score is
// recomputed from raw vectors or raw token lists with plain loops. Used by
// the test suites and by the CLI's --oracle mode that produces golden files.

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "qobf/embeddings.hpp"
#include "qobf/retrieval.hpp"
#include "qobf/wbb.hpp"

namespace qobf::oracle {

double Similarity(std::span<const double> a, std::span<const double> b,
                  SimilarityMeasure measure);

// Full ordering of the vocabulary by repeated selection of the best
// remaining word; returns the first `count`.
std::vector<ScoredWord> RankBySimilarity(const EmbeddingStore& store,
                                         std::string_view probe,
                                         SimilarityMeasure measure,
                                         std::size_t count);

struct BoxWords {
  std::vector<std::string> safe_box;
  std::vector<std::string> candidates;
};

// Sort every word, slice [0, k) and [k, k + n).
BoxWords SortAndSlice(const EmbeddingStore& store, std::string_view probe,
                      std::size_t k, std::size_t n, SimilarityMeasure measure);

// Box with z-scores, utilities and probabilities over the oracle ranking.
CandidateBox BuildBoxes(std::string_view probe, const MechanismConfig& config,
                        const EmbeddingStore& store);

// Scores over raw token lists; one entry per document, zero when unmatched.
std::vector<double> Bm25Scores(const std::vector<std::vector<std::string>>& docs,
                               std::span<const std::string> query,
                               const Bm25Params& params);
std::vector<double> TfidfScores(const std::vector<std::vector<std::string>>& docs,
                                std::span<const std::string> query);
// Cosine of mean vectors; documents without in-vocabulary tokens get NaN.
std::vector<double> EmbeddingScores(const std::vector<std::vector<std::string>>& docs,
                                    std::span<const std::string> query,
                                    const EmbeddingStore& store);

// DCG over graded relevances listed in rank order, normalized by the ideal
// ordering of `all_grades`.
double Ndcg(std::span<const int> ranked_grades, std::vector<int> all_grades,
            std::size_t cutoff);

// Unindexed corpus answering the same searches as IndexedCorpus.
class BruteForceCorpus {
 public:
  BruteForceCorpus(const std::vector<Document>& documents,
                   const EmbeddingStore* store);

  RunList Bm25Search(std::span<const std::string> query, const Bm25Params& params,
                     std::size_t top, std::string_view query_id,
                     std::string_view tag = "bm25") const;
  RunList TfidfSearch(std::span<const std::string> query, std::size_t top,
                      std::string_view query_id, std::string_view tag = "tfidf") const;
  RunList EmbeddingSearch(std::span<const std::string> query, std::size_t top,
                          std::string_view query_id,
                          std::string_view tag = "embedding") const;
  RunList Rerank(const std::set<std::string>& pool,
                 std::span<const std::string> original_query,
                 std::string_view query_id, std::string_view tag = "rerank") const;

 private:
  std::vector<std::string> ids_;
  std::vector<std::vector<std::string>> docs_;
  const EmbeddingStore* store_;
};

}  // namespace qobf::oracle

#endif  // QOBF_ORACLE_HPP_
