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

#include "qobf/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <nlohmann/json.hpp>
#include <unordered_set>

#include "qobf/error.hpp"
#include "qobf/preprocess.hpp"
#include "strings.hpp"

namespace qobf {
namespace {

std::ifstream OpenInput(const std::filesystem::path& path, std::string_view what) {
  std::ifstream in(path);
  if (!in) {
    Fail(ErrorCode::kIo, "cannot open " + std::string(what) + " '" + path.string() + "'");
  }
  return in;
}

double LtcWeight(std::size_t tf, double idf) {
  return (1.0 + std::log(static_cast<double>(tf))) * idf;
}

std::map<std::string, std::size_t> TermCounts(std::span<const std::string> tokens) {
  std::map<std::string, std::size_t> counts;
  for (const auto& t : tokens) ++counts[t];
  return counts;
}

}  // namespace

std::vector<Document> ReadCorpus(const std::filesystem::path& path) {
  auto in = OpenInput(path, "corpus");
  return ParseCorpus(in);
}

std::vector<Document> ParseCorpus(std::istream& in) {
  std::vector<Document> docs;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (internal::Trim(line).empty()) continue;
    const auto where = "corpus line " + std::to_string(line_number);
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      Fail(ErrorCode::kParse, where + ": " + e.what());
    }
    if (!record.is_object() || !record.contains("doc_id") ||
        !record.contains("text") || !record["doc_id"].is_string() ||
        !record["text"].is_string()) {
      Fail(ErrorCode::kParse, where + ": expected string fields doc_id and text");
    }
    docs.push_back({record["doc_id"].get<std::string>(),
                    record["text"].get<std::string>()});
  }
  return docs;
}

std::vector<Query> ReadQueries(const std::filesystem::path& path) {
  auto in = OpenInput(path, "queries");
  return ParseQueries(in);
}

std::vector<Query> ParseQueries(std::istream& in) {
  std::vector<Query> queries;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (internal::Trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      Fail(ErrorCode::kParse,
           "queries line " + std::to_string(line_number) + ": expected '<qid>\\t<text>'");
    }
    std::string id = line.substr(0, tab);
    if (!seen.insert(id).second) {
      Fail(ErrorCode::kDuplicate, "duplicate query id '" + id + "'");
    }
    queries.push_back({std::move(id), line.substr(tab + 1)});
  }
  return queries;
}

Qrels Qrels::Load(const std::filesystem::path& path) {
  auto in = OpenInput(path, "qrels");
  return Parse(in);
}

Qrels Qrels::Parse(std::istream& in) {
  Qrels qrels;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto fields = internal::SplitWhitespace(line);
    if (fields.empty()) continue;
    const auto relevance = fields.size() == 4 ? internal::ParseInt(fields[3]) : std::nullopt;
    if (!relevance || *relevance < 0) {
      Fail(ErrorCode::kParse, "qrels line " + std::to_string(line_number) +
                                  ": expected '<qid> 0 <docid> <rel>' with rel >= 0");
    }
    qrels.Add(fields[0], fields[2], static_cast<int>(*relevance));
  }
  return qrels;
}

void Qrels::Add(std::string_view query_id, std::string_view doc_id, int relevance) {
  if (relevance < 0) Fail(ErrorCode::kInvalidArgument, "relevance must be >= 0");
  auto& docs = judgments_[std::string(query_id)];
  if (!docs.emplace(std::string(doc_id), relevance).second) {
    Fail(ErrorCode::kDuplicate, "duplicate judgment for (" + std::string(query_id) +
                                    ", " + std::string(doc_id) + ")");
  }
}

int Qrels::Relevance(std::string_view query_id, std::string_view doc_id) const {
  const auto q = judgments_.find(query_id);
  if (q == judgments_.end()) return 0;
  const auto d = q->second.find(std::string(doc_id));
  return d == q->second.end() ? 0 : d->second;
}

std::set<std::string> Qrels::Relevant(std::string_view query_id) const {
  std::set<std::string> out;
  const auto q = judgments_.find(query_id);
  if (q == judgments_.end()) return out;
  for (const auto& [doc, rel] : q->second) {
    if (rel > 0) out.insert(doc);
  }
  return out;
}

bool Qrels::HasRelevant(std::string_view query_id) const {
  return !Relevant(query_id).empty();
}

std::vector<int> Qrels::Grades(std::string_view query_id) const {
  std::vector<int> out;
  const auto q = judgments_.find(query_id);
  if (q == judgments_.end()) return out;
  for (const auto& [doc, rel] : q->second) out.push_back(rel);
  return out;
}

bool RunList::IsValid() const {
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].rank != i + 1) return false;
    if (i > 0 && entries[i].score > entries[i - 1].score) return false;
    if (!seen.insert(entries[i].doc_id).second) return false;
  }
  return true;
}

std::vector<std::string> RunList::DocIds() const {
  std::vector<std::string> out;
  for (const auto& e : entries) out.push_back(e.doc_id);
  return out;
}

RunList MakeRun(std::string_view query_id, std::string_view tag,
                std::vector<std::pair<std::string, double>> scored,
                std::size_t top) {
  const auto before = [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  };
  const std::size_t keep = std::min(top, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep),
                    scored.end(), before);
  RunList run;
  run.query_id = std::string(query_id);
  run.tag = std::string(tag);
  for (std::size_t i = 0; i < keep; ++i) {
    run.entries.push_back({std::move(scored[i].first), scored[i].second, i + 1});
  }
  return run;
}

std::string FormatRun(const RunList& run) {
  std::string out;
  for (const auto& e : run.entries) {
    out += fmt::format("{} Q0 {} {} {:.6f} {}\n", run.query_id, e.doc_id, e.rank,
                       e.score, run.tag);
  }
  return out;
}

IndexedCorpus IndexedCorpus::Build(const std::vector<Document>& documents,
                                   const EmbeddingStore* store) {
  if (documents.empty()) Fail(ErrorCode::kInvalidArgument, "cannot index an empty corpus");
  IndexedCorpus index;
  std::size_t total_length = 0;
  for (const auto& doc : documents) {
    const auto doc_number = index.doc_ids_.size();
    if (!index.doc_index_.emplace(doc.id, doc_number).second) {
      Fail(ErrorCode::kDuplicate, "duplicate doc id '" + doc.id + "'");
    }
    index.doc_ids_.push_back(doc.id);
    index.tokens_.push_back(NormalizeAndTokenize(doc.text));
    const auto& tokens = index.tokens_.back();
    total_length += tokens.size();
    for (const auto& [term, tf] : TermCounts(tokens)) {
      index.postings_[term].push_back(
          {static_cast<uint32_t>(doc_number), static_cast<uint32_t>(tf)});
    }
  }
  index.average_length_ =
      static_cast<double>(total_length) / static_cast<double>(documents.size());

  index.tfidf_norms_.assign(index.size(), 0.0);
  for (std::size_t d = 0; d < index.size(); ++d) {
    double squares = 0.0;
    for (const auto& [term, tf] : TermCounts(index.tokens_[d])) {
      const double w = LtcWeight(tf, index.idf(term));
      squares += w * w;
    }
    index.tfidf_norms_[d] = std::sqrt(squares);
  }

  index.doc_embeddings_.resize(index.size());
  if (store != nullptr) {
    index.has_embeddings_ = true;
    for (std::size_t d = 0; d < index.size(); ++d) {
      index.doc_embeddings_[d] = store->MeanVector(index.tokens_[d]);
    }
  }
  return index;
}

std::optional<std::size_t> IndexedCorpus::DocIndex(std::string_view doc_id) const {
  const auto it = doc_index_.find(std::string(doc_id));
  if (it == doc_index_.end()) return std::nullopt;
  return it->second;
}

std::span<const Posting> IndexedCorpus::postings(std::string_view term) const {
  const auto it = postings_.find(std::string(term));
  if (it == postings_.end()) return {};
  return it->second;
}

double IndexedCorpus::idf(std::string_view term) const {
  const std::size_t df = document_frequency(term);
  if (df == 0) return 0.0;
  return std::log(static_cast<double>(size()) / static_cast<double>(df));
}

double Bm25Idf(std::size_t corpus_size, std::size_t document_frequency) {
  const double n = static_cast<double>(corpus_size);
  const double df = static_cast<double>(document_frequency);
  return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

RunList Bm25Search(const IndexedCorpus& index, std::span<const std::string> query,
                   const Bm25Params& params, std::size_t top,
                   std::string_view query_id, std::string_view tag) {
  if (!(params.k1 > 0.0) || !(params.b >= 0.0 && params.b <= 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "BM25 needs k1 > 0 and b in [0, 1]");
  }
  std::vector<double> scores(index.size(), 0.0);
  for (const auto& term : query) {
    const auto postings = index.postings(term);
    if (postings.empty()) continue;
    const double idf = Bm25Idf(index.size(), postings.size());
    for (const auto& p : postings) {
      const double tf = p.tf;
      const double length_ratio =
          static_cast<double>(index.doc_length(p.doc)) / index.average_length();
      scores[p.doc] += idf * tf * (params.k1 + 1.0) /
                       (tf + params.k1 * (1.0 - params.b + params.b * length_ratio));
    }
  }
  std::vector<std::pair<std::string, double>> scored;
  for (std::size_t d = 0; d < scores.size(); ++d) {
    if (scores[d] > 0.0) scored.emplace_back(index.doc_id(d), scores[d]);
  }
  return MakeRun(query_id, tag, std::move(scored), top);
}

RunList TfidfSearch(const IndexedCorpus& index, std::span<const std::string> query,
                    std::size_t top, std::string_view query_id,
                    std::string_view tag) {
  std::vector<double> dots(index.size(), 0.0);
  double query_squares = 0.0;
  for (const auto& [term, qtf] : TermCounts(query)) {
    const double idf = index.idf(term);
    if (idf == 0.0) continue;
    const double q = LtcWeight(qtf, idf);
    query_squares += q * q;
    for (const auto& p : index.postings(term)) dots[p.doc] += q * LtcWeight(p.tf, idf);
  }
  std::vector<std::pair<std::string, double>> scored;
  if (query_squares > 0.0) {
    const double query_norm = std::sqrt(query_squares);
    for (std::size_t d = 0; d < dots.size(); ++d) {
      if (dots[d] > 0.0 && index.tfidf_norm(d) > 0.0) {
        scored.emplace_back(index.doc_id(d), dots[d] / (query_norm * index.tfidf_norm(d)));
      }
    }
  }
  return MakeRun(query_id, tag, std::move(scored), top);
}

namespace {

std::vector<double> QueryEmbedding(const IndexedCorpus& index,
                                   std::span<const std::string> query,
                                   const EmbeddingStore& store) {
  if (!index.has_embeddings()) {
    Fail(ErrorCode::kInvalidArgument, "index was built without embeddings");
  }
  auto mean = store.MeanVector(query);
  if (!mean) {
    Fail(ErrorCode::kInvalidArgument, "query has no in-vocabulary token");
  }
  return std::move(*mean);
}

double DenseScore(const std::vector<double>& query, const IndexedCorpus& index,
                  std::size_t doc) {
  const auto& vec = index.doc_embedding(doc);
  if (!vec) return 0.0;
  try {
    return CosineSimilarity(query, *vec);
  } catch (const Error&) {
    return 0.0;  // zero mean vector on either side
  }
}

}  // namespace

RunList EmbeddingSearch(const IndexedCorpus& index,
                        std::span<const std::string> query,
                        const EmbeddingStore& store, std::size_t top,
                        std::string_view query_id, std::string_view tag) {
  const auto q = QueryEmbedding(index, query, store);
  std::vector<std::pair<std::string, double>> scored;
  for (std::size_t d = 0; d < index.size(); ++d) {
    if (!index.doc_embedding(d)) continue;
    scored.emplace_back(index.doc_id(d), DenseScore(q, index, d));
  }
  return MakeRun(query_id, tag, std::move(scored), top);
}

std::set<std::string> PoolRuns(std::span<const RunList> runs) {
  std::set<std::string> pool;
  for (const auto& run : runs) {
    if (run.query_id != runs.front().query_id) {
      Fail(ErrorCode::kInvalidArgument, "cannot pool runs of different queries ('" +
                                            runs.front().query_id + "' and '" +
                                            run.query_id + "')");
    }
    for (const auto& e : run.entries) pool.insert(e.doc_id);
  }
  return pool;
}

RunList Rerank(const std::set<std::string>& pool,
               std::span<const std::string> original_query,
               const EmbeddingStore& store, const IndexedCorpus& index,
               std::string_view query_id, std::string_view tag) {
  if (pool.empty()) return MakeRun(query_id, tag, {}, 0);
  const auto q = QueryEmbedding(index, original_query, store);
  std::vector<std::pair<std::string, double>> scored;
  for (const auto& doc_id : pool) {
    const auto doc = index.DocIndex(doc_id);
    if (!doc) Fail(ErrorCode::kInvalidArgument, "pooled doc '" + doc_id + "' is not indexed");
    scored.emplace_back(doc_id, DenseScore(q, index, *doc));
  }
  const std::size_t keep = scored.size();
  return MakeRun(query_id, tag, std::move(scored), keep);
}

double PooledRecall(const std::set<std::string>& pool, const Qrels& qrels,
                    std::string_view query_id) {
  const auto relevant = qrels.Relevant(query_id);
  if (relevant.empty()) {
    Fail(ErrorCode::kUndefinedMetric,
         "query '" + std::string(query_id) + "' has no relevant documents");
  }
  std::size_t found = 0;
  for (const auto& doc : relevant) found += pool.contains(doc) ? 1 : 0;
  return static_cast<double>(found) / static_cast<double>(relevant.size());
}

double RunRecall(const RunList& run, const Qrels& qrels) {
  const auto ids = run.DocIds();
  return PooledRecall(std::set<std::string>(ids.begin(), ids.end()), qrels,
                      run.query_id);
}

double NdcgAt(const RunList& run, const Qrels& qrels, std::size_t cutoff) {
  if (cutoff == 0) Fail(ErrorCode::kInvalidArgument, "nDCG cutoff must be >= 1");
  auto grades = qrels.Grades(run.query_id);
  std::sort(grades.rbegin(), grades.rend());
  if (grades.empty() || grades.front() <= 0) {
    Fail(ErrorCode::kUndefinedMetric,
         "query '" + run.query_id + "' has no relevant documents");
  }
  const auto gain = [](int rel) { return std::exp2(static_cast<double>(rel)) - 1.0; };
  const auto discount = [](std::size_t rank) {
    return std::log2(static_cast<double>(rank) + 1.0);
  };
  double dcg = 0.0;
  for (std::size_t i = 0; i < std::min(cutoff, run.entries.size()); ++i) {
    dcg += gain(qrels.Relevance(run.query_id, run.entries[i].doc_id)) / discount(i + 1);
  }
  double ideal = 0.0;
  for (std::size_t i = 0; i < std::min(cutoff, grades.size()); ++i) {
    ideal += gain(grades[i]) / discount(i + 1);
  }
  return dcg / ideal;
}

}  // namespace qobf
