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

#include "qobf/qobf.h"

#include <memory>
#include <new>
#include <string>
#include <vector>

#include "qobf/baselines.hpp"
#include "qobf/embeddings.hpp"
#include "qobf/error.hpp"
#include "qobf/experiment.hpp"
#include "qobf/mechanism.hpp"
#include "qobf/preprocess.hpp"
#include "qobf/privacy_metrics.hpp"
#include "qobf/retrieval.hpp"
#include "qobf/wbb.hpp"

struct qobf_embeddings {
  std::shared_ptr<const qobf::EmbeddingStore> store;
};

struct qobf_ranking {
  std::vector<qobf::ScoredWord> words;
};

struct qobf_box {
  qobf::CandidateBox box;
  std::string json;
};

struct qobf_lexicon {
  qobf::TagLexicon lexicon;
};

struct qobf_obfuscation {
  qobf::ObfuscationResult result;
  std::string text;
  std::string normalized;
  std::string provenance;
};

struct qobf_corpus {
  std::shared_ptr<const qobf::EmbeddingStore> store;
  qobf::IndexedCorpus index;
};

struct qobf_qrels {
  qobf::Qrels qrels;
};

struct qobf_run {
  qobf::RunList run;
  std::string trec;
};

struct qobf_experiment {
  qobf::ExperimentConfig config;
};

namespace {

thread_local std::string last_error;

qobf_status ToStatus(qobf::ErrorCode code) { return static_cast<qobf_status>(code); }

// Runs fn, translating exceptions into a status and the thread's message.
template <typename F>
qobf_status Guard(F&& fn) {
  try {
    fn();
    last_error.clear();
    return QOBF_OK;
  } catch (const qobf::Error& e) {
    last_error = e.what();
    return ToStatus(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown exception";
  }
  return QOBF_ERR_INTERNAL;
}

void Require(bool ok, const char* what) {
  if (!ok) qobf::Fail(qobf::ErrorCode::kInvalidArgument, what);
}

qobf::SimilarityMeasure ToMeasure(qobf_measure measure) {
  switch (measure) {
    case QOBF_MEASURE_ANGLE:
      return qobf::SimilarityMeasure::kAngle;
    case QOBF_MEASURE_DISTANCE:
      return qobf::SimilarityMeasure::kDistance;
    case QOBF_MEASURE_PRODUCT:
      return qobf::SimilarityMeasure::kProduct;
  }
  qobf::Fail(qobf::ErrorCode::kInvalidArgument, "unknown measure");
}

}  // namespace

extern "C" {

const char* qobf_version(void) { return "0.1.0"; }

const char* qobf_status_name(qobf_status status) {
  return qobf::ErrorCodeName(static_cast<qobf::ErrorCode>(status));
}

const char* qobf_last_error(void) { return last_error.c_str(); }

qobf_status qobf_embeddings_load(const char* path, size_t expected_dim,
                                 qobf_embeddings** out) {
  return Guard([&] {
    Require(path != nullptr && out != nullptr, "null argument");
    std::optional<size_t> dim;
    if (expected_dim > 0) dim = expected_dim;
    auto store = std::make_shared<const qobf::EmbeddingStore>(
        qobf::EmbeddingStore::Load(path, dim));
    *out = new qobf_embeddings{std::move(store)};
  });
}

void qobf_embeddings_free(qobf_embeddings* store) { delete store; }

size_t qobf_embeddings_size(const qobf_embeddings* store) {
  return store ? store->store->size() : 0;
}

size_t qobf_embeddings_dim(const qobf_embeddings* store) {
  return store ? store->store->dimension() : 0;
}

int qobf_embeddings_contains(const qobf_embeddings* store, const char* word) {
  return store && word && store->store->Contains(word) ? 1 : 0;
}

qobf_status qobf_embeddings_similarity(const qobf_embeddings* store, const char* a,
                                       const char* b, qobf_measure measure, double* out) {
  return Guard([&] {
    Require(store && a && b && out, "null argument");
    const auto& s = *store->store;
    const auto ia = s.IndexOf(a);
    const auto ib = s.IndexOf(b);
    if (!ia || !ib) qobf::Fail(qobf::ErrorCode::kOutOfVocabulary, "word not in vocabulary");
    *out = s.Similarity(*ia, *ib, ToMeasure(measure));
  });
}

qobf_status qobf_embeddings_rank(const qobf_embeddings* store, const char* probe,
                                 qobf_measure measure, size_t count, qobf_ranking** out) {
  return Guard([&] {
    Require(store && probe && out, "null argument");
    *out = new qobf_ranking{store->store->RankBySimilarity(probe, ToMeasure(measure), count)};
  });
}

size_t qobf_ranking_size(const qobf_ranking* ranking) {
  return ranking ? ranking->words.size() : 0;
}

const char* qobf_ranking_word(const qobf_ranking* ranking, size_t i) {
  if (!ranking || i >= ranking->words.size()) return nullptr;
  return ranking->words[i].word.c_str();
}

double qobf_ranking_score(const qobf_ranking* ranking, size_t i) {
  if (!ranking || i >= ranking->words.size()) return 0.0;
  return ranking->words[i].score;
}

void qobf_ranking_free(qobf_ranking* ranking) { delete ranking; }

double qobf_utility(double z_score) { return qobf::Utility(z_score); }

qobf_status qobf_sampling_distribution(const double* utilities, size_t n, double epsilon,
                                       double* out) {
  return Guard([&] {
    Require(utilities != nullptr && out != nullptr, "null argument");
    const auto p = qobf::SamplingDistribution({utilities, n}, epsilon);
    std::copy(p.begin(), p.end(), out);
  });
}

qobf_status qobf_box_build(const qobf_embeddings* store, const char* probe, size_t k,
                           size_t n, double epsilon, qobf_measure measure, qobf_box** out) {
  return Guard([&] {
    Require(store && probe && out, "null argument");
    const qobf::MechanismConfig config{k, n, epsilon, ToMeasure(measure)};
    auto box = qobf::BuildBoxes(probe, config, *store->store);
    std::string json = box.ToJson();
    *out = new qobf_box{std::move(box), std::move(json)};
  });
}

size_t qobf_box_safe_size(const qobf_box* box) { return box ? box->box.safe_box.size() : 0; }

const char* qobf_box_safe_word(const qobf_box* box, size_t i) {
  if (!box || i >= box->box.safe_box.size()) return nullptr;
  return box->box.safe_box[i].c_str();
}

size_t qobf_box_candidate_count(const qobf_box* box) {
  return box ? box->box.candidates.size() : 0;
}

qobf_status qobf_box_candidate(const qobf_box* box, size_t i, qobf_candidate* out) {
  return Guard([&] {
    Require(box && out, "null argument");
    Require(i < box->box.candidates.size(), "candidate index out of range");
    const auto& c = box->box.candidates[i];
    *out = {c.word.c_str(), c.similarity, c.z_score, c.utility, c.probability};
  });
}

const char* qobf_box_json(const qobf_box* box) { return box ? box->json.c_str() : nullptr; }

void qobf_box_free(qobf_box* box) { delete box; }

qobf_status qobf_lexicon_load(const char* lexicon_path, const char* stopwords_path,
                              qobf_lexicon** out) {
  return Guard([&] {
    Require(lexicon_path && out, "null argument");
    std::optional<std::filesystem::path> stop;
    if (stopwords_path != nullptr) stop = stopwords_path;
    *out = new qobf_lexicon{qobf::TagLexicon::Load(lexicon_path, stop)};
  });
}

void qobf_lexicon_free(qobf_lexicon* lexicon) { delete lexicon; }

qobf_status qobf_obfuscate(const qobf_embeddings* store, const qobf_lexicon* lexicon,
                           const qobf_mechanism_params* params, const char* query_text,
                           uint64_t seed, const char* query_id, size_t replicate,
                           qobf_obfuscation** out) {
  return Guard([&] {
    Require(store && params && query_text && out, "null argument");
    const auto& s = *store->store;
    const qobf::TagLexicon fallback;
    const auto query = qobf::PrepareQuery(query_text, s, lexicon ? lexicon->lexicon : fallback);
    std::unique_ptr<qobf::Mechanism> mechanism;
    switch (params->kind) {
      case QOBF_MECHANISM_NONE:
        mechanism = std::make_unique<qobf::IdentityMechanism>();
        break;
      case QOBF_MECHANISM_WBB:
        mechanism = std::make_unique<qobf::WbbMechanism>(
            s, qobf::MechanismConfig{params->k, params->n, params->epsilon,
                                     ToMeasure(params->measure)});
        break;
      case QOBF_MECHANISM_CMP:
      case QOBF_MECHANISM_MAHALANOBIS:
        mechanism = std::make_unique<qobf::NoiseMechanism>(
            s, qobf::NoiseMechanismConfig{params->epsilon,
                                          params->kind == QOBF_MECHANISM_CMP
                                              ? qobf::NoiseVariant::kCmp
                                              : qobf::NoiseVariant::kMahalanobis,
                                          params->lambda});
        break;
      default:
        qobf::Fail(qobf::ErrorCode::kInvalidArgument, "unknown mechanism kind");
    }
    auto rng = qobf::ReplicateStream(seed, query_id ? query_id : "", replicate);
    auto result = mechanism->ObfuscateQuery(query, rng);
    auto* handle = new qobf_obfuscation{std::move(result), {}, {}, {}};
    handle->text = handle->result.Text();
    handle->normalized = handle->result.original.Normalized();
    handle->provenance = handle->result.ProvenanceCodes();
    *out = handle;
  });
}

const char* qobf_obfuscation_text(const qobf_obfuscation* result) {
  return result ? result->text.c_str() : nullptr;
}

const char* qobf_obfuscation_normalized(const qobf_obfuscation* result) {
  return result ? result->normalized.c_str() : nullptr;
}

const char* qobf_obfuscation_provenance(const qobf_obfuscation* result) {
  return result ? result->provenance.c_str() : nullptr;
}

uint64_t qobf_obfuscation_stream(const qobf_obfuscation* result) {
  return result ? result->result.stream_id : 0;
}

void qobf_obfuscation_free(qobf_obfuscation* result) { delete result; }

qobf_status qobf_jaccard(const char* original, const char* obfuscated, double* out) {
  return Guard([&] {
    Require(original && obfuscated && out, "null argument");
    *out = qobf::Jaccard(qobf::NormalizeAndTokenize(original),
                         qobf::NormalizeAndTokenize(obfuscated));
  });
}

qobf_status qobf_semantic_similarity(const qobf_embeddings* store, const char* original,
                                     const char* obfuscated, double* out) {
  return Guard([&] {
    Require(store && original && obfuscated && out, "null argument");
    *out = qobf::SemanticSimilarity(qobf::NormalizeAndTokenize(original),
                                    qobf::NormalizeAndTokenize(obfuscated), *store->store);
  });
}

qobf_status qobf_corpus_load(const char* jsonl_path, const qobf_embeddings* store,
                             qobf_corpus** out) {
  return Guard([&] {
    Require(jsonl_path && out, "null argument");
    std::shared_ptr<const qobf::EmbeddingStore> shared;
    if (store != nullptr) shared = store->store;
    auto index = qobf::IndexedCorpus::Build(qobf::ReadCorpus(jsonl_path), shared.get());
    *out = new qobf_corpus{std::move(shared), std::move(index)};
  });
}

size_t qobf_corpus_size(const qobf_corpus* corpus) { return corpus ? corpus->index.size() : 0; }

void qobf_corpus_free(qobf_corpus* corpus) { delete corpus; }

qobf_status qobf_corpus_search(const qobf_corpus* corpus, qobf_scorer scorer,
                               const char* query_text, size_t top, const char* query_id,
                               qobf_run** out) {
  return Guard([&] {
    Require(corpus && query_text && out, "null argument");
    const auto tokens = qobf::NormalizeAndTokenize(query_text);
    const std::string qid = query_id ? query_id : "";
    qobf::RunList run;
    switch (scorer) {
      case QOBF_SCORER_BM25:
        run = qobf::Bm25Search(corpus->index, tokens, {}, top, qid);
        break;
      case QOBF_SCORER_TFIDF:
        run = qobf::TfidfSearch(corpus->index, tokens, top, qid);
        break;
      case QOBF_SCORER_EMBEDDING:
        Require(corpus->store != nullptr, "corpus was loaded without embeddings");
        run = qobf::EmbeddingSearch(corpus->index, tokens, *corpus->store, top, qid);
        break;
      default:
        qobf::Fail(qobf::ErrorCode::kInvalidArgument, "unknown scorer");
    }
    std::string trec = qobf::FormatRun(run);
    *out = new qobf_run{std::move(run), std::move(trec)};
  });
}

size_t qobf_run_size(const qobf_run* run) { return run ? run->run.entries.size() : 0; }

const char* qobf_run_doc(const qobf_run* run, size_t i) {
  if (!run || i >= run->run.entries.size()) return nullptr;
  return run->run.entries[i].doc_id.c_str();
}

double qobf_run_score(const qobf_run* run, size_t i) {
  if (!run || i >= run->run.entries.size()) return 0.0;
  return run->run.entries[i].score;
}

const char* qobf_run_trec(const qobf_run* run) { return run ? run->trec.c_str() : nullptr; }

void qobf_run_free(qobf_run* run) { delete run; }

qobf_status qobf_qrels_load(const char* path, qobf_qrels** out) {
  return Guard([&] {
    Require(path && out, "null argument");
    *out = new qobf_qrels{qobf::Qrels::Load(path)};
  });
}

void qobf_qrels_free(qobf_qrels* qrels) { delete qrels; }

qobf_status qobf_ndcg(const qobf_run* run, const qobf_qrels* qrels, size_t cutoff,
                      double* out) {
  return Guard([&] {
    Require(run && qrels && out, "null argument");
    *out = qobf::NdcgAt(run->run, qrels->qrels, cutoff);
  });
}

qobf_status qobf_recall(const qobf_run* run, const qobf_qrels* qrels, double* out) {
  return Guard([&] {
    Require(run && qrels && out, "null argument");
    *out = qobf::RunRecall(run->run, qrels->qrels);
  });
}

qobf_status qobf_experiment_create(qobf_experiment** out) {
  return Guard([&] {
    Require(out != nullptr, "null argument");
    *out = new qobf_experiment{};
  });
}

qobf_status qobf_experiment_load(const char* config_path, qobf_experiment** out) {
  return Guard([&] {
    Require(config_path && out, "null argument");
    *out = new qobf_experiment{qobf::ExperimentConfig::Load(config_path)};
  });
}

qobf_status qobf_experiment_set(qobf_experiment* experiment, const char* key,
                                const char* value) {
  return Guard([&] {
    Require(experiment && key && value, "null argument");
    experiment->config.Set(key, value);
  });
}

qobf_status qobf_experiment_run(const qobf_experiment* experiment, const char* command,
                                size_t* skipped_queries) {
  return Guard([&] {
    Require(experiment && command, "null argument");
    const auto output = qobf::RunCommand(command, experiment->config);
    if (skipped_queries != nullptr) *skipped_queries = output.skipped_queries;
  });
}

void qobf_experiment_free(qobf_experiment* experiment) { delete experiment; }

}  // extern "C"
