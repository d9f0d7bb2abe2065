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

#ifndef QOBF_RETRIEVAL_HPP_
#define QOBF_RETRIEVAL_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qobf/embeddings.hpp"

namespace qobf {

struct Document {
  std::string id;
  std::string text;
};

struct Query {
  std::string id;
  std::string text;
};

// `{"doc_id": ..., "text": ...}` per line.
std::vector<Document> ReadCorpus(const std::filesystem::path& path);
std::vector<Document> ParseCorpus(std::istream& in);

// `<qid>\t<text>` per line.
std::vector<Query> ReadQueries(const std::filesystem::path& path);
std::vector<Query> ParseQueries(std::istream& in);

// TREC qrels: `<qid> 0 <docid> <rel>`.
class Qrels {
 public:
  static Qrels Load(const std::filesystem::path& path);
  static Qrels Parse(std::istream& in);

  // Throws kDuplicate for a repeated (qid, docid) pair.
  void Add(std::string_view query_id, std::string_view doc_id, int relevance);

  int Relevance(std::string_view query_id, std::string_view doc_id) const;
  // Documents with relevance > 0.
  std::set<std::string> Relevant(std::string_view query_id) const;
  bool HasRelevant(std::string_view query_id) const;
  // All judged grades for the query, including zeros.
  std::vector<int> Grades(std::string_view query_id) const;

 private:
  std::map<std::string, std::map<std::string, int>, std::less<>> judgments_;
};

struct RunEntry {
  std::string doc_id;
  double score = 0.0;
  std::size_t rank = 0;
};

struct RunList {
  std::string query_id;
  std::string tag;
  std::vector<RunEntry> entries;

  // Contiguous ranks from 1, non-increasing scores, unique doc ids.
  bool IsValid() const;
  std::vector<std::string> DocIds() const;
};

// Orders (doc, score) pairs by score descending then doc id, keeps `top`.
RunList MakeRun(std::string_view query_id, std::string_view tag,
                std::vector<std::pair<std::string, double>> scored,
                std::size_t top);

// `<qid> Q0 <docid> <rank> <score> <tag>` lines, score with 6 decimals.
std::string FormatRun(const RunList& run);

struct Posting {
  uint32_t doc = 0;
  uint32_t tf = 0;
};

// Inverted index over normalized documents, plus the per-document mean
// embedding for the dense scorer. Immutable once built.
class IndexedCorpus {
 public:
  // Documents are normalized with NormalizeAndTokenize. `store` is optional;
  // without it EmbeddingSearch and Rerank are unavailable.
  static IndexedCorpus Build(const std::vector<Document>& documents,
                             const EmbeddingStore* store = nullptr);

  std::size_t size() const { return doc_ids_.size(); }
  const std::string& doc_id(std::size_t doc) const { return doc_ids_[doc]; }
  std::optional<std::size_t> DocIndex(std::string_view doc_id) const;
  const std::vector<std::string>& tokens(std::size_t doc) const { return tokens_[doc]; }
  std::size_t doc_length(std::size_t doc) const { return tokens_[doc].size(); }
  double average_length() const { return average_length_; }

  std::span<const Posting> postings(std::string_view term) const;
  std::size_t document_frequency(std::string_view term) const {
    return postings(term).size();
  }
  std::size_t term_count() const { return postings_.size(); }

  // ltc weight norm of the document vector.
  double tfidf_norm(std::size_t doc) const { return tfidf_norms_[doc]; }
  double idf(std::string_view term) const;

  bool has_embeddings() const { return has_embeddings_; }
  // nullopt when the document has no in-vocabulary token.
  const std::optional<std::vector<double>>& doc_embedding(std::size_t doc) const {
    return doc_embeddings_[doc];
  }

 private:
  std::vector<std::string> doc_ids_;
  std::unordered_map<std::string, std::size_t> doc_index_;
  std::vector<std::vector<std::string>> tokens_;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
  std::vector<double> tfidf_norms_;
  double average_length_ = 0.0;
  bool has_embeddings_ = false;
  std::vector<std::optional<std::vector<double>>> doc_embeddings_;
};

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

// Robertson-Sparck Jones idf with +1 inside the log, so it stays positive.
double Bm25Idf(std::size_t corpus_size, std::size_t document_frequency);

// Zero-score documents are left out of lexical runs.
RunList Bm25Search(const IndexedCorpus& index, std::span<const std::string> query,
                   const Bm25Params& params, std::size_t top,
                   std::string_view query_id = "", std::string_view tag = "bm25");

// Cosine between ltc-weighted query and document vectors.
RunList TfidfSearch(const IndexedCorpus& index, std::span<const std::string> query,
                    std::size_t top, std::string_view query_id = "",
                    std::string_view tag = "tfidf");

// Cosine between the mean query vector and each document's mean vector.
// Throws kInvalidArgument without any in-vocabulary query token.
RunList EmbeddingSearch(const IndexedCorpus& index,
                        std::span<const std::string> query,
                        const EmbeddingStore& store, std::size_t top,
                        std::string_view query_id = "",
                        std::string_view tag = "embedding");

// Union of the retrieved documents. Throws kInvalidArgument when the runs
// belong to different queries.
std::set<std::string> PoolRuns(std::span<const RunList> runs);

// Orders the pool by embedding cosine against the original query. Ties go
// by doc id; an empty pool gives an empty run.
RunList Rerank(const std::set<std::string>& pool,
               std::span<const std::string> original_query,
               const EmbeddingStore& store, const IndexedCorpus& index,
               std::string_view query_id = "", std::string_view tag = "rerank");

// Both throw kUndefinedMetric when the query has no relevant document.
double PooledRecall(const std::set<std::string>& pool, const Qrels& qrels,
                    std::string_view query_id);
double RunRecall(const RunList& run, const Qrels& qrels);

// Gain 2^rel - 1, discount log2(rank + 1), normalized by the ideal DCG.
double NdcgAt(const RunList& run, const Qrels& qrels, std::size_t cutoff);

}  // namespace qobf

#endif  // QOBF_RETRIEVAL_HPP_
