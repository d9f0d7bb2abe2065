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

#include "qobf/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <exception>
#include <fmt/format.h>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <nlohmann/json.hpp>
#include <thread>

#include "qobf/baselines.hpp"
#include "qobf/error.hpp"
#include "qobf/mechanism.hpp"
#include "qobf/oracle.hpp"
#include "qobf/preprocess.hpp"
#include "qobf/privacy_metrics.hpp"
#include "qobf/wbb.hpp"
#include "strings.hpp"

namespace qobf {
namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kMechanismNames[] = {"wbb", "cmp", "mahalanobis", "none"};
constexpr std::string_view kScorerNames[] = {"bm25", "tfidf", "embedding"};

[[noreturn]] void BadValue(std::string_view key, std::string_view value) {
  Fail(ErrorCode::kInvalidArgument,
       "bad value '" + std::string(value) + "' for '" + std::string(key) + "'");
}

std::vector<std::string> ParseList(std::string_view value) {
  std::vector<std::string> items;
  for (auto item : internal::Split(value, ',')) {
    item = internal::Trim(item);
    if (!item.empty()) items.push_back(internal::ToLower(item));
  }
  return items;
}

std::size_t ParseCount(std::string_view key, std::string_view value) {
  const auto parsed = internal::ParseInt(internal::Trim(value));
  if (!parsed || *parsed < 0) BadValue(key, value);
  return static_cast<std::size_t>(*parsed);
}

double ParseReal(std::string_view key, std::string_view value) {
  const auto parsed = internal::ParseDouble(internal::Trim(value));
  if (!parsed || !std::isfinite(*parsed)) BadValue(key, value);
  return *parsed;
}

bool ParseBool(std::string_view key, std::string_view value) {
  const auto lower = internal::ToLower(internal::Trim(value));
  if (lower == "true" || lower == "1" || lower == "yes" || lower == "on") return true;
  if (lower == "false" || lower == "0" || lower == "no" || lower == "off") return false;
  BadValue(key, value);
}

fs::path ResolvePath(std::string_view value, const fs::path& base) {
  fs::path p{std::string(internal::Trim(value))};
  if (p.is_relative() && !base.empty()) return base / p;
  return p;
}

template <typename T, typename F>
std::vector<T> ParseEach(std::string_view key, std::string_view value, F parse) {
  std::vector<T> out;
  for (const auto& item : ParseList(value)) out.push_back(parse(key, item));
  if (out.empty()) BadValue(key, value);
  return out;
}

// Runs fn(i) for i in [0, count) on up to `workers` threads; the first
// exception is rethrown after all threads finish.
template <typename F>
void ParallelFor(std::size_t count, std::size_t workers, F fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

struct Inputs {
  std::optional<EmbeddingStore> store;
  TagLexicon lexicon;
  std::vector<Query> queries;
  std::vector<TaggedQuery> tagged;
  std::vector<Document> documents;
  std::optional<Qrels> qrels;
};

Inputs LoadInputs(const ExperimentConfig& config, bool retrieval) {
  Inputs in;
  in.store.emplace(EmbeddingStore::Load(config.embeddings, config.embedding_dim));
  if (!config.lexicon.empty()) {
    std::optional<fs::path> stop;
    if (!config.stopwords.empty()) stop = config.stopwords;
    in.lexicon = TagLexicon::Load(config.lexicon, stop);
  } else if (!config.stopwords.empty()) {
    std::istringstream empty;
    std::ifstream stop(config.stopwords);
    if (!stop) Fail(ErrorCode::kIo, "cannot open stop-word list '" + config.stopwords.string() + "'");
    in.lexicon = TagLexicon::Parse(empty, &stop);
  }
  if (!config.target_tags.empty()) in.lexicon.SetTargetTags(config.target_tags);
  in.queries = ReadQueries(config.queries);
  for (const auto& q : in.queries) in.tagged.push_back(PrepareQuery(q.text, *in.store, in.lexicon));
  if (retrieval) {
    in.documents = ReadCorpus(config.corpus);
    in.qrels.emplace(Qrels::Load(config.qrels));
  }
  return in;
}

std::unique_ptr<Mechanism> MakeMechanism(const Cell& cell, const EmbeddingStore& store,
                                         const ExperimentConfig& config) {
  if (cell.mechanism == "none") return std::make_unique<IdentityMechanism>();
  if (cell.IsWbb()) {
    const MechanismConfig wbb{cell.k, cell.n, cell.epsilon, cell.measure};
    return std::make_unique<WbbMechanism>(
        store, wbb, config.oracle ? &oracle::BuildBoxes : &BuildBoxes);
  }
  NoiseMechanismConfig noise{cell.epsilon, NoiseVariant::kCmp, config.lambda};
  if (cell.mechanism == "mahalanobis") noise.variant = NoiseVariant::kMahalanobis;
  return std::make_unique<NoiseMechanism>(store, noise);
}

bool Feasible(const Cell& cell, const EmbeddingStore& store) {
  return !cell.IsWbb() || cell.k + cell.n <= store.size();
}

// Replicates for every query, streams keyed by (seed, qid, replicate) only,
// so all cells share common random numbers.
std::vector<std::vector<ObfuscationResult>> ObfuscateCell(const Cell& cell,
                                                          const Inputs& in,
                                                          const ExperimentConfig& config) {
  const auto mechanism = MakeMechanism(cell, *in.store, config);
  std::vector<std::vector<ObfuscationResult>> out;
  for (std::size_t q = 0; q < in.queries.size(); ++q) {
    out.push_back(ObfuscateBatch(*mechanism, in.tagged[q], config.batch, config.seed,
                                 in.queries[q].id));
  }
  return out;
}

std::string ObfuscationHeader() {
  return "qid\treplicate\tmechanism\tepsilon\tk\tn\tmeasure\tstream\ttext\tprovenance\n";
}

std::string ObfuscationRows(const Cell& cell, const Inputs& in,
                            const std::vector<std::vector<ObfuscationResult>>& results) {
  std::string out;
  const std::string k = cell.IsWbb() ? std::to_string(cell.k) : "-";
  const std::string n = cell.IsWbb() ? std::to_string(cell.n) : "-";
  const std::string measure = cell.IsWbb() ? std::string(MeasureName(cell.measure)) : "-";
  for (std::size_t q = 0; q < results.size(); ++q) {
    for (std::size_t r = 0; r < results[q].size(); ++r) {
      const auto& res = results[q][r];
      out += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:016x}\t{}\t{}\n", in.queries[q].id, r,
                         cell.mechanism, FormatNumber(cell.epsilon), k, n, measure,
                         res.stream_id, res.Text(), res.ProvenanceCodes());
    }
  }
  return out;
}

PrivacyReport ScoreCell(const Cell& cell, const Inputs& in,
                        const std::vector<std::vector<ObfuscationResult>>& results) {
  PrivacyReport report;
  for (std::size_t q = 0; q < results.size(); ++q) {
    report.records.push_back(ScoreReplicates(in.queries[q].id, cell.Label(), cell.epsilon,
                                             results[q], *in.store));
  }
  report.Aggregate();
  return report;
}

// Search backends: the inverted index or the brute-force oracle.
class Retriever {
 public:
  Retriever(const Inputs& in, const ExperimentConfig& config) : config_(config), store_(*in.store) {
    if (config.oracle) {
      brute_.emplace(in.documents, &store_);
    } else {
      index_.emplace(IndexedCorpus::Build(in.documents, &store_));
    }
  }

  RunList Search(std::string_view scorer, std::span<const std::string> query,
                 std::string_view qid, std::string_view tag) const {
    if (scorer == "bm25") {
      return brute_ ? brute_->Bm25Search(query, config_.bm25, config_.depth, qid, tag)
                    : Bm25Search(*index_, query, config_.bm25, config_.depth, qid, tag);
    }
    if (scorer == "tfidf") {
      return brute_ ? brute_->TfidfSearch(query, config_.depth, qid, tag)
                    : TfidfSearch(*index_, query, config_.depth, qid, tag);
    }
    if (!store_.MeanVector(query)) return MakeRun(qid, tag, {}, 0);
    return brute_ ? brute_->EmbeddingSearch(query, config_.depth, qid, tag)
                  : EmbeddingSearch(*index_, query, store_, config_.depth, qid, tag);
  }

  RunList Rerank(const std::set<std::string>& pool, std::span<const std::string> query,
                 std::string_view qid, std::string_view tag) const {
    if (!store_.MeanVector(query)) {
      std::vector<std::pair<std::string, double>> flat;
      for (const auto& d : pool) flat.emplace_back(d, 0.0);
      return MakeRun(qid, tag, std::move(flat), pool.size());
    }
    return brute_ ? brute_->Rerank(pool, query, qid, tag)
                  : qobf::Rerank(pool, query, store_, *index_, qid, tag);
  }

 private:
  const ExperimentConfig& config_;
  const EmbeddingStore& store_;
  std::optional<IndexedCorpus> index_;
  std::optional<oracle::BruteForceCorpus> brute_;
};

struct QueryRetrieval {
  std::string qid;
  std::string scorer;
  std::size_t pool_size = 0;
  double pooled_recall = 0.0;
  double mean_replicate_recall = 0.0;
  double max_replicate_recall = 0.0;
  double ndcg = 0.0;
};

struct RetrievalSummary {
  std::string label;
  std::string mechanism;
  std::string epsilon;
  std::string scorer;
  std::size_t queries = 0;
  double pooled_recall = 0.0;
  double mean_replicate_recall = 0.0;
  double max_replicate_recall = 0.0;
  double ndcg = 0.0;
};

struct CellRetrieval {
  std::vector<QueryRetrieval> per_query;
  std::vector<RetrievalSummary> summary;
  // scorer -> TREC lines of the re-ranked pools
  std::vector<std::pair<std::string, std::string>> runs;
};

std::vector<std::size_t> JudgedQueries(const Inputs& in) {
  std::vector<std::size_t> judged;
  for (std::size_t q = 0; q < in.queries.size(); ++q) {
    if (in.qrels->HasRelevant(in.queries[q].id)) judged.push_back(q);
  }
  return judged;
}

RetrievalSummary Summarize(std::string label, std::string mechanism, std::string epsilon,
                           const std::string& scorer,
                           const std::vector<QueryRetrieval>& rows) {
  RetrievalSummary s{std::move(label), std::move(mechanism), std::move(epsilon), scorer};
  for (const auto& r : rows) {
    if (r.scorer != scorer) continue;
    ++s.queries;
    s.pooled_recall += r.pooled_recall;
    s.mean_replicate_recall += r.mean_replicate_recall;
    s.max_replicate_recall += r.max_replicate_recall;
    s.ndcg += r.ndcg;
  }
  if (s.queries > 0) {
    const double n = static_cast<double>(s.queries);
    s.pooled_recall /= n;
    s.mean_replicate_recall /= n;
    s.max_replicate_recall /= n;
    s.ndcg /= n;
  }
  return s;
}

CellRetrieval EvaluateCell(const Cell& cell, const Inputs& in, const Retriever& retriever,
                           const ExperimentConfig& config,
                           const std::vector<std::vector<ObfuscationResult>>& results) {
  CellRetrieval out;
  const auto judged = JudgedQueries(in);
  for (const auto& scorer : config.scorers) {
    std::string run_text;
    for (std::size_t q : judged) {
      const auto& qid = in.queries[q].id;
      std::vector<RunList> runs;
      QueryRetrieval row{qid, scorer};
      for (const auto& replicate : results[q]) {
        runs.push_back(retriever.Search(scorer, replicate.tokens, qid, scorer));
        const double recall = RunRecall(runs.back(), *in.qrels);
        row.mean_replicate_recall += recall;
        row.max_replicate_recall = std::max(row.max_replicate_recall, recall);
      }
      row.mean_replicate_recall /= static_cast<double>(runs.size());
      const auto pool = PoolRuns(runs);
      row.pool_size = pool.size();
      row.pooled_recall = PooledRecall(pool, *in.qrels, qid);
      const auto reranked =
          retriever.Rerank(pool, in.tagged[q].Surfaces(), qid, cell.Label() + "/" + scorer);
      row.ndcg = NdcgAt(reranked, *in.qrels, config.cutoff);
      run_text += FormatRun(reranked);
      out.per_query.push_back(row);
    }
    out.runs.emplace_back(scorer, std::move(run_text));
    out.summary.push_back(Summarize(cell.Label(), cell.mechanism, FormatNumber(cell.epsilon),
                                    scorer, out.per_query));
  }
  return out;
}

std::string Tsv(double value) { return fmt::format("{:.6f}", value); }

std::string SummaryHeader(std::size_t cutoff) {
  return fmt::format(
      "label\tmechanism\tepsilon\tscorer\tqueries\tpooled_recall\treplicate_recall\t"
      "max_replicate_recall\tndcg@{}\n",
      cutoff);
}

std::string SummaryRow(const RetrievalSummary& s) {
  return fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n", s.label, s.mechanism, s.epsilon,
                     s.scorer, s.queries, Tsv(s.pooled_recall), Tsv(s.mean_replicate_recall),
                     Tsv(s.max_replicate_recall), Tsv(s.ndcg));
}

Json SummaryJson(const RetrievalSummary& s) {
  return Json{{"label", s.label},
              {"mechanism", s.mechanism},
              {"epsilon", s.epsilon},
              {"scorer", s.scorer},
              {"queries", s.queries},
              {"pooled_recall", s.pooled_recall},
              {"replicate_recall", s.mean_replicate_recall},
              {"max_replicate_recall", s.max_replicate_recall},
              {"ndcg", s.ndcg}};
}

std::size_t WarnSkipped(const Inputs& in) {
  std::size_t skipped = 0;
  for (const auto& q : in.queries) {
    if (in.qrels->HasRelevant(q.id)) continue;
    ++skipped;
    fmt::print(stderr, "warning: query '{}' has no relevant documents; skipped\n", q.id);
  }
  return skipped;
}

}  // namespace

std::string FormatNumber(double value) { return fmt::format("{:g}", value); }

std::string Cell::Label() const {
  if (!IsWbb()) return mechanism;
  return fmt::format("wbb:k={},n={},meas={}", k, n, MeasureName(measure));
}

std::string Cell::DirectoryName() const {
  if (!IsWbb()) {
    return fmt::format("mech-{}_eps-{}_k-na_n-na_meas-na", mechanism, FormatNumber(epsilon));
  }
  return fmt::format("mech-wbb_eps-{}_k-{}_n-{}_meas-{}", FormatNumber(epsilon), k, n,
                     MeasureName(measure));
}

std::vector<Cell> ExpandCells(const ExperimentConfig& config) {
  std::vector<Cell> cells;
  for (const auto& mechanism : config.mechanisms) {
    if (mechanism == "none") {
      cells.push_back({mechanism, 0.0});
      continue;
    }
    for (double epsilon : config.epsilons) {
      if (mechanism != "wbb") {
        cells.push_back({mechanism, epsilon});
        continue;
      }
      for (std::size_t k : config.ks) {
        for (std::size_t n : config.ns) {
          for (auto measure : config.measures) cells.push_back({mechanism, epsilon, k, n, measure});
        }
      }
    }
  }
  return cells;
}

ExperimentConfig ExperimentConfig::Load(const fs::path& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    Fail(ErrorCode::kParse, e.what());
  }
  ExperimentConfig config;
  const fs::path base = path.parent_path();
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      config.Set(name, node.data(), base);
      continue;
    }
    for (const auto& [key, leaf] : node) config.Set(name + "." + key, leaf.data(), base);
  }
  return config;
}

void ExperimentConfig::Set(std::string_view key, std::string_view value, const fs::path& base) {
  const std::string k = internal::ToLower(internal::Trim(key));
  if (k == "inputs.embeddings") {
    embeddings = ResolvePath(value, base);
  } else if (k == "inputs.embedding_dim") {
    embedding_dim = ParseCount(k, value);
    if (*embedding_dim == 0) embedding_dim.reset();
  } else if (k == "inputs.lexicon") {
    lexicon = ResolvePath(value, base);
  } else if (k == "inputs.stopwords") {
    stopwords = ResolvePath(value, base);
  } else if (k == "inputs.corpus") {
    corpus = ResolvePath(value, base);
  } else if (k == "inputs.queries") {
    queries = ResolvePath(value, base);
  } else if (k == "inputs.qrels") {
    qrels = ResolvePath(value, base);
  } else if (k == "inputs.target_tags") {
    const auto items = ParseList(value);
    target_tags = std::set<std::string>(items.begin(), items.end());
  } else if (k == "mechanism.name") {
    mechanisms = ParseList(value);
    for (const auto& m : mechanisms) {
      if (std::find(std::begin(kMechanismNames), std::end(kMechanismNames), m) ==
          std::end(kMechanismNames)) {
        BadValue(k, m);
      }
    }
  } else if (k == "mechanism.epsilon") {
    epsilons = ParseEach<double>(k, value, ParseReal);
  } else if (k == "mechanism.k") {
    ks = ParseEach<std::size_t>(k, value, ParseCount);
  } else if (k == "mechanism.n") {
    ns = ParseEach<std::size_t>(k, value, ParseCount);
  } else if (k == "mechanism.measure") {
    measures = ParseEach<SimilarityMeasure>(
        k, value, [](std::string_view, std::string_view v) { return ParseMeasure(v); });
  } else if (k == "mechanism.lambda") {
    lambda = ParseReal(k, value);
  } else if (k == "retrieval.scorers") {
    scorers = ParseList(value);
    for (const auto& s : scorers) {
      if (std::find(std::begin(kScorerNames), std::end(kScorerNames), s) ==
          std::end(kScorerNames)) {
        BadValue(k, s);
      }
    }
  } else if (k == "retrieval.depth") {
    depth = ParseCount(k, value);
  } else if (k == "retrieval.cutoff") {
    cutoff = ParseCount(k, value);
  } else if (k == "retrieval.k1") {
    bm25.k1 = ParseReal(k, value);
  } else if (k == "retrieval.b") {
    bm25.b = ParseReal(k, value);
  } else if (k == "run.batch") {
    batch = ParseCount(k, value);
  } else if (k == "run.seed") {
    const auto parsed = internal::ParseInt(internal::Trim(value));
    if (!parsed) BadValue(k, value);
    seed = static_cast<uint64_t>(*parsed);
  } else if (k == "run.out") {
    out = ResolvePath(value, base);
  } else if (k == "run.workers") {
    workers = ParseCount(k, value);
  } else if (k == "run.oracle") {
    oracle = ParseBool(k, value);
  } else {
    Fail(ErrorCode::kInvalidArgument, "unknown configuration key '" + std::string(key) + "'");
  }
}

void ExperimentConfig::Validate(bool needs_retrieval) const {
  const auto require = [](const fs::path& p, std::string_view what) {
    if (p.empty()) Fail(ErrorCode::kInvalidArgument, std::string(what) + " path is not set");
    if (!fs::exists(p)) {
      Fail(ErrorCode::kIo, std::string(what) + " '" + p.string() + "' does not exist");
    }
  };
  require(embeddings, "embeddings");
  require(queries, "queries");
  if (!lexicon.empty()) require(lexicon, "lexicon");
  if (!stopwords.empty()) require(stopwords, "stop-word list");
  if (needs_retrieval) {
    require(corpus, "corpus");
    require(qrels, "qrels");
  }
  if (mechanisms.empty()) Fail(ErrorCode::kInvalidArgument, "no mechanism configured");
  if (epsilons.empty() || ks.empty() || ns.empty() || measures.empty()) {
    Fail(ErrorCode::kInvalidArgument, "parameter grids must be non-empty");
  }
  for (const auto& m : mechanisms) {
    for (double e : epsilons) {
      if (e < 0.0 || ((m == "cmp" || m == "mahalanobis") && e <= 0.0)) {
        Fail(ErrorCode::kInvalidArgument,
             "epsilon " + FormatNumber(e) + " is not valid for mechanism " + m);
      }
    }
  }
  for (std::size_t n : ns) {
    if (n == 0) Fail(ErrorCode::kInvalidArgument, "candidate box size n must be >= 1");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "lambda must lie in [0, 1]");
  }
  if (batch == 0) Fail(ErrorCode::kInvalidArgument, "batch count must be >= 1");
  if (needs_retrieval && (depth == 0 || cutoff == 0 || scorers.empty())) {
    Fail(ErrorCode::kInvalidArgument, "retrieval needs depth >= 1, cutoff >= 1 and a scorer");
  }
}

void WriteFileAtomically(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path temp = path.string() + ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) Fail(ErrorCode::kIo, "cannot write '" + temp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) Fail(ErrorCode::kIo, "short write to '" + temp.string() + "'");
  }
  std::error_code ec;
  fs::rename(temp, path, ec);
  if (ec) Fail(ErrorCode::kIo, "cannot rename '" + temp.string() + "': " + ec.message());
}

CommandOutput RunObfuscate(const ExperimentConfig& config) {
  config.Validate(false);
  const Inputs in = LoadInputs(config, false);
  const auto cells = ExpandCells(config);
  std::vector<std::string> chunks(cells.size());
  ParallelFor(cells.size(), config.workers, [&](std::size_t c) {
    if (!Feasible(cells[c], *in.store)) {
      Fail(ErrorCode::kInvalidArgument, "k + n exceeds the vocabulary for " + cells[c].Label());
    }
    chunks[c] = ObfuscationRows(cells[c], in, ObfuscateCell(cells[c], in, config));
  });
  std::string content = ObfuscationHeader();
  for (const auto& chunk : chunks) content += chunk;
  CommandOutput output;
  output.files.push_back(config.out / "obfuscated.tsv");
  WriteFileAtomically(output.files.back(), content);
  return output;
}

CommandOutput RunPrivacyEval(const ExperimentConfig& config) {
  config.Validate(false);
  const Inputs in = LoadInputs(config, false);
  const auto cells = ExpandCells(config);
  std::vector<PrivacyReport> parts(cells.size());
  ParallelFor(cells.size(), config.workers, [&](std::size_t c) {
    if (!Feasible(cells[c], *in.store)) {
      Fail(ErrorCode::kInvalidArgument, "k + n exceeds the vocabulary for " + cells[c].Label());
    }
    parts[c] = ScoreCell(cells[c], in, ObfuscateCell(cells[c], in, config));
  });
  PrivacyReport report;
  for (auto& part : parts) {
    report.records.insert(report.records.end(), part.records.begin(), part.records.end());
  }
  report.Aggregate();
  CommandOutput output;
  output.files = {config.out / "privacy_records.tsv", config.out / "privacy_summary.tsv",
                  config.out / "privacy.json"};
  WriteFileAtomically(output.files[0], report.RecordsTsv());
  WriteFileAtomically(output.files[1], report.AggregatesTsv());
  WriteFileAtomically(output.files[2], report.ToJson());
  return output;
}

CommandOutput RunRetrievalEval(const ExperimentConfig& config) {
  config.Validate(true);
  const Inputs in = LoadInputs(config, true);
  const Retriever retriever(in, config);
  CommandOutput output;
  output.skipped_queries = WarnSkipped(in);
  const auto judged = JudgedQueries(in);

  // Direct retrieval with the private query, no obfuscation or pooling.
  std::vector<QueryRetrieval> direct_rows;
  std::vector<std::pair<std::string, std::string>> direct_runs;
  for (const auto& scorer : config.scorers) {
    std::string text;
    for (std::size_t q : judged) {
      const auto run = retriever.Search(scorer, in.tagged[q].Surfaces(), in.queries[q].id,
                                        "direct/" + scorer);
      const double recall = RunRecall(run, *in.qrels);
      direct_rows.push_back({in.queries[q].id, scorer, run.entries.size(), recall, recall,
                             recall, NdcgAt(run, *in.qrels, config.cutoff)});
      text += FormatRun(run);
    }
    direct_runs.emplace_back(scorer, std::move(text));
  }

  const auto cells = ExpandCells(config);
  std::vector<CellRetrieval> parts(cells.size());
  ParallelFor(cells.size(), config.workers, [&](std::size_t c) {
    if (!Feasible(cells[c], *in.store)) {
      Fail(ErrorCode::kInvalidArgument, "k + n exceeds the vocabulary for " + cells[c].Label());
    }
    parts[c] = EvaluateCell(cells[c], in, retriever, config, ObfuscateCell(cells[c], in, config));
  });

  std::string summary = SummaryHeader(config.cutoff);
  std::string per_query = fmt::format(
      "label\tepsilon\tscorer\tqid\tpool_size\tpooled_recall\treplicate_recall\t"
      "max_replicate_recall\tndcg@{}\n",
      config.cutoff);
  Json doc;
  doc["skipped_queries"] = output.skipped_queries;
  doc["evaluated_queries"] = judged.size();
  auto& rows = doc["summary"] = Json::array();
  const auto add_per_query = [&](const std::string& label, const std::string& eps,
                                 const std::vector<QueryRetrieval>& list) {
    for (const auto& r : list) {
      per_query += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n", label, eps, r.scorer,
                               r.qid, r.pool_size, Tsv(r.pooled_recall),
                               Tsv(r.mean_replicate_recall), Tsv(r.max_replicate_recall),
                               Tsv(r.ndcg));
    }
  };
  for (const auto& scorer : config.scorers) {
    const auto s = Summarize("direct", "direct", "-", scorer, direct_rows);
    summary += SummaryRow(s);
    rows.push_back(SummaryJson(s));
  }
  add_per_query("direct", "-", direct_rows);
  for (const auto& [scorer, text] : direct_runs) {
    output.files.push_back(config.out / "runs" / ("direct__" + scorer + ".run"));
    WriteFileAtomically(output.files.back(), text);
  }
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (const auto& s : parts[c].summary) {
      summary += SummaryRow(s);
      rows.push_back(SummaryJson(s));
    }
    add_per_query(cells[c].Label(), FormatNumber(cells[c].epsilon), parts[c].per_query);
    for (const auto& [scorer, text] : parts[c].runs) {
      output.files.push_back(config.out / "runs" /
                             (cells[c].DirectoryName() + "__" + scorer + ".run"));
      WriteFileAtomically(output.files.back(), text);
    }
  }
  output.files.push_back(config.out / "retrieval_summary.tsv");
  WriteFileAtomically(output.files.back(), summary);
  output.files.push_back(config.out / "retrieval_per_query.tsv");
  WriteFileAtomically(output.files.back(), per_query);
  output.files.push_back(config.out / "retrieval.json");
  WriteFileAtomically(output.files.back(), doc.dump(2) + "\n");
  return output;
}

CommandOutput RunSweep(const ExperimentConfig& config) {
  const bool retrieval = !config.corpus.empty() && !config.qrels.empty();
  config.Validate(retrieval);
  const Inputs in = LoadInputs(config, retrieval);
  std::optional<Retriever> retriever;
  CommandOutput output;
  if (retrieval) {
    retriever.emplace(in, config);
    output.skipped_queries = WarnSkipped(in);
  }
  const auto cells = ExpandCells(config);

  struct Row {
    bool feasible = false;
    PrivacyAggregate privacy;
    std::vector<RetrievalSummary> retrieval;
  };
  std::vector<Row> rows(cells.size());
  std::vector<std::string> cell_files(cells.size());
  ParallelFor(cells.size(), config.workers, [&](std::size_t c) {
    const Cell& cell = cells[c];
    if (!Feasible(cell, *in.store)) return;
    rows[c].feasible = true;
    const auto results = ObfuscateCell(cell, in, config);
    const auto report = ScoreCell(cell, in, results);
    rows[c].privacy = report.aggregates.front();
    Json record{{"label", cell.Label()},
                {"mechanism", cell.mechanism},
                {"epsilon", cell.epsilon}};
    if (cell.IsWbb()) {
      record["k"] = cell.k;
      record["n"] = cell.n;
      record["measure"] = MeasureName(cell.measure);
      record["candidate_box_size"] = cell.n;
    }
    record["jaccard"] = rows[c].privacy.jaccard.mean;
    record["target_jaccard"] = rows[c].privacy.target_jaccard.mean;
    record["semantic"] = rows[c].privacy.semantic_similarity.mean;
    if (retriever) {
      rows[c].retrieval = EvaluateCell(cell, in, *retriever, config, results).summary;
      auto& list = record["retrieval"] = Json::array();
      for (const auto& s : rows[c].retrieval) list.push_back(SummaryJson(s));
    }
    const fs::path dir = config.out / cell.DirectoryName();
    WriteFileAtomically(dir / "obfuscated.tsv",
                        ObfuscationHeader() + ObfuscationRows(cell, in, results));
    WriteFileAtomically(dir / "cell.json", record.dump(2) + "\n");
  });

  std::string tsv = "label\tmechanism\tepsilon\tk\tn\tmeasure\tstatus\tjaccard\t"
                    "target_jaccard\tsemantic";
  std::vector<std::string> header = {"label", "eps", "k", "n", "measure", "status",
                                     "jaccard", "target_j", "semantic"};
  if (retrieval) {
    for (const auto& s : config.scorers) {
      tsv += fmt::format("\trecall_{0}\tndcg_{0}", s);
      header.push_back("recall_" + s);
      header.push_back("ndcg_" + s);
    }
  }
  tsv += "\n";
  std::vector<std::vector<std::string>> table;
  Json doc = Json::array();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const Cell& cell = cells[c];
    const Row& row = rows[c];
    std::vector<std::string> fields = {
        cell.Label(),
        FormatNumber(cell.epsilon),
        cell.IsWbb() ? std::to_string(cell.k) : "-",
        cell.IsWbb() ? std::to_string(cell.n) : "-",
        cell.IsWbb() ? std::string(MeasureName(cell.measure)) : "-",
        row.feasible ? "ok" : "infeasible"};
    Json entry{{"label", cell.Label()},
               {"directory", cell.DirectoryName()},
               {"mechanism", cell.mechanism},
               {"epsilon", cell.epsilon},
               {"status", fields[5]}};
    if (cell.IsWbb()) {
      entry["k"] = cell.k;
      entry["n"] = cell.n;
      entry["measure"] = MeasureName(cell.measure);
    }
    if (row.feasible) {
      fields.push_back(Tsv(row.privacy.jaccard.mean));
      fields.push_back(Tsv(row.privacy.target_jaccard.mean));
      fields.push_back(Tsv(row.privacy.semantic_similarity.mean));
      entry["jaccard"] = row.privacy.jaccard.mean;
      entry["target_jaccard"] = row.privacy.target_jaccard.mean;
      entry["semantic"] = row.privacy.semantic_similarity.mean;
      for (const auto& s : row.retrieval) {
        fields.push_back(Tsv(s.pooled_recall));
        fields.push_back(Tsv(s.ndcg));
        entry["recall_" + s.scorer] = s.pooled_recall;
        entry["ndcg_" + s.scorer] = s.ndcg;
      }
    }
    while (fields.size() < header.size()) fields.push_back("-");
    doc.push_back(entry);
    tsv += fields[0] + "\t" + cell.mechanism;
    for (std::size_t i = 1; i < fields.size(); ++i) tsv += "\t" + fields[i];
    tsv += "\n";
    table.push_back(std::move(fields));
  }

  std::vector<std::size_t> widths(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) widths[i] = header[i].size();
  for (const auto& fields : table) {
    for (std::size_t i = 0; i < fields.size(); ++i) widths[i] = std::max(widths[i], fields[i].size());
  }
  std::string text;
  const auto emit = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      text += fmt::format("{:<{}}", fields[i], widths[i]);
      text += i + 1 < fields.size() ? "  " : "\n";
    }
  };
  emit(header);
  for (const auto& fields : table) emit(fields);

  output.files = {config.out / "sweep.tsv", config.out / "sweep.json", config.out / "sweep.txt"};
  WriteFileAtomically(output.files[0], tsv);
  WriteFileAtomically(output.files[1], doc.dump(2) + "\n");
  WriteFileAtomically(output.files[2], text);
  return output;
}

CommandOutput RunCommand(std::string_view command, const ExperimentConfig& config) {
  if (command == "obfuscate") return RunObfuscate(config);
  if (command == "privacy-eval") return RunPrivacyEval(config);
  if (command == "retrieval-eval") return RunRetrievalEval(config);
  if (command == "sweep") return RunSweep(config);
  Fail(ErrorCode::kInvalidArgument, "unknown command '" + std::string(command) + "'");
}

}  // namespace qobf
