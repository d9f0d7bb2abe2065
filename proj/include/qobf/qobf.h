/*
 * Copyright 2026 The qobf Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to the query obfuscation toolkit.
 *
 * Every object is an opaque handle created by a *_load / *_build / *_create
 * call and released with the matching *_free (NULL is accepted). Fallible
 * calls return a qobf_status; on failure qobf_last_error() describes the
 * problem for the calling thread. Strings returned by accessors are owned by
 * the handle and stay valid until it is freed.
 *
 * Handles are immutable after creation except qobf_experiment, and may be
 * used from several threads at once.
 */

#ifndef QOBF_QOBF_H_
#define QOBF_QOBF_H_

#include <stddef.h>
#include <stdint.h>

#if defined(QOBF_BUILDING_LIBRARY)
#define QOBF_API __attribute__((visibility("default")))
#else
#define QOBF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qobf_status {
  QOBF_OK = 0,
  QOBF_ERR_INVALID_ARGUMENT = 1,
  QOBF_ERR_PARSE = 2,
  QOBF_ERR_OUT_OF_VOCABULARY = 3,
  QOBF_ERR_DUPLICATE = 4,
  QOBF_ERR_IO = 5,
  QOBF_ERR_UNDEFINED_METRIC = 6,
  QOBF_ERR_INTERNAL = 7
} qobf_status;

typedef enum qobf_measure {
  QOBF_MEASURE_ANGLE = 0,
  QOBF_MEASURE_DISTANCE = 1,
  QOBF_MEASURE_PRODUCT = 2
} qobf_measure;

typedef enum qobf_mechanism_kind {
  QOBF_MECHANISM_NONE = 0,
  QOBF_MECHANISM_WBB = 1,
  QOBF_MECHANISM_CMP = 2,
  QOBF_MECHANISM_MAHALANOBIS = 3
} qobf_mechanism_kind;

typedef enum qobf_scorer {
  QOBF_SCORER_BM25 = 0,
  QOBF_SCORER_TFIDF = 1,
  QOBF_SCORER_EMBEDDING = 2
} qobf_scorer;

/* k, n and measure apply to WBB, lambda to Mahalanobis. */
typedef struct qobf_mechanism_params {
  qobf_mechanism_kind kind;
  size_t k;
  size_t n;
  double epsilon;
  qobf_measure measure;
  double lambda;
} qobf_mechanism_params;

typedef struct qobf_candidate {
  const char* word;
  double similarity;
  double z_score;
  double utility;
  double probability;
} qobf_candidate;

typedef struct qobf_embeddings qobf_embeddings;
typedef struct qobf_ranking qobf_ranking;
typedef struct qobf_box qobf_box;
typedef struct qobf_lexicon qobf_lexicon;
typedef struct qobf_obfuscation qobf_obfuscation;
typedef struct qobf_corpus qobf_corpus;
typedef struct qobf_qrels qobf_qrels;
typedef struct qobf_run qobf_run;
typedef struct qobf_experiment qobf_experiment;

QOBF_API const char* qobf_version(void);
QOBF_API const char* qobf_status_name(qobf_status status);
/* Message of the last failed call on this thread, "" if none. */
QOBF_API const char* qobf_last_error(void);

/* Embeddings. expected_dim == 0 infers the dimension from the first row. */
QOBF_API qobf_status qobf_embeddings_load(const char* path, size_t expected_dim,
                                          qobf_embeddings** out);
QOBF_API void qobf_embeddings_free(qobf_embeddings* store);
QOBF_API size_t qobf_embeddings_size(const qobf_embeddings* store);
QOBF_API size_t qobf_embeddings_dim(const qobf_embeddings* store);
QOBF_API int qobf_embeddings_contains(const qobf_embeddings* store, const char* word);
QOBF_API qobf_status qobf_embeddings_similarity(const qobf_embeddings* store,
                                                const char* a, const char* b,
                                                qobf_measure measure, double* out);
QOBF_API qobf_status qobf_embeddings_rank(const qobf_embeddings* store,
                                          const char* probe, qobf_measure measure,
                                          size_t count, qobf_ranking** out);
QOBF_API size_t qobf_ranking_size(const qobf_ranking* ranking);
QOBF_API const char* qobf_ranking_word(const qobf_ranking* ranking, size_t i);
QOBF_API double qobf_ranking_score(const qobf_ranking* ranking, size_t i);
QOBF_API void qobf_ranking_free(qobf_ranking* ranking);

/* Box mechanism primitives. */
QOBF_API double qobf_utility(double z_score);
/* Writes n probabilities to out; epsilon >= 0. */
QOBF_API qobf_status qobf_sampling_distribution(const double* utilities, size_t n,
                                                double epsilon, double* out);
QOBF_API qobf_status qobf_box_build(const qobf_embeddings* store, const char* probe,
                                    size_t k, size_t n, double epsilon,
                                    qobf_measure measure, qobf_box** out);
QOBF_API size_t qobf_box_safe_size(const qobf_box* box);
QOBF_API const char* qobf_box_safe_word(const qobf_box* box, size_t i);
QOBF_API size_t qobf_box_candidate_count(const qobf_box* box);
QOBF_API qobf_status qobf_box_candidate(const qobf_box* box, size_t i,
                                        qobf_candidate* out);
/* JSON diagnostic record of the box. */
QOBF_API const char* qobf_box_json(const qobf_box* box);
QOBF_API void qobf_box_free(qobf_box* box);

/* Tag lexicon. stopwords_path may be NULL. */
QOBF_API qobf_status qobf_lexicon_load(const char* lexicon_path,
                                       const char* stopwords_path,
                                       qobf_lexicon** out);
QOBF_API void qobf_lexicon_free(qobf_lexicon* lexicon);

/*
 * Obfuscates one query. lexicon may be NULL (every non-stop word is a noun).
 * The draw uses the stream derived from (seed, query_id, replicate), the
 * same stream the experiment commands use.
 */
QOBF_API qobf_status qobf_obfuscate(const qobf_embeddings* store,
                                    const qobf_lexicon* lexicon,
                                    const qobf_mechanism_params* params,
                                    const char* query_text, uint64_t seed,
                                    const char* query_id, size_t replicate,
                                    qobf_obfuscation** out);
QOBF_API const char* qobf_obfuscation_text(const qobf_obfuscation* result);
QOBF_API const char* qobf_obfuscation_normalized(const qobf_obfuscation* result);
/* One letter per token: R replaced, N kept non-target, O kept out-of-vocabulary. */
QOBF_API const char* qobf_obfuscation_provenance(const qobf_obfuscation* result);
QOBF_API uint64_t qobf_obfuscation_stream(const qobf_obfuscation* result);
QOBF_API void qobf_obfuscation_free(qobf_obfuscation* result);

/* Privacy metrics over normalized token sets of two texts. */
QOBF_API qobf_status qobf_jaccard(const char* original, const char* obfuscated,
                                  double* out);
QOBF_API qobf_status qobf_semantic_similarity(const qobf_embeddings* store,
                                              const char* original,
                                              const char* obfuscated, double* out);

/* Retrieval. store may be NULL, which disables QOBF_SCORER_EMBEDDING. */
QOBF_API qobf_status qobf_corpus_load(const char* jsonl_path,
                                      const qobf_embeddings* store,
                                      qobf_corpus** out);
QOBF_API size_t qobf_corpus_size(const qobf_corpus* corpus);
QOBF_API void qobf_corpus_free(qobf_corpus* corpus);
/* BM25 uses k1 = 1.2, b = 0.75. */
QOBF_API qobf_status qobf_corpus_search(const qobf_corpus* corpus, qobf_scorer scorer,
                                        const char* query_text, size_t top,
                                        const char* query_id, qobf_run** out);
QOBF_API size_t qobf_run_size(const qobf_run* run);
QOBF_API const char* qobf_run_doc(const qobf_run* run, size_t i);
QOBF_API double qobf_run_score(const qobf_run* run, size_t i);
/* TREC run lines. */
QOBF_API const char* qobf_run_trec(const qobf_run* run);
QOBF_API void qobf_run_free(qobf_run* run);

QOBF_API qobf_status qobf_qrels_load(const char* path, qobf_qrels** out);
QOBF_API void qobf_qrels_free(qobf_qrels* qrels);
QOBF_API qobf_status qobf_ndcg(const qobf_run* run, const qobf_qrels* qrels,
                               size_t cutoff, double* out);
QOBF_API qobf_status qobf_recall(const qobf_run* run, const qobf_qrels* qrels,
                                 double* out);

/*
 * Experiment commands: "obfuscate", "privacy-eval", "retrieval-eval",
 * "sweep". Keys are "section.key" as in the config file.
 */
QOBF_API qobf_status qobf_experiment_create(qobf_experiment** out);
QOBF_API qobf_status qobf_experiment_load(const char* config_path,
                                          qobf_experiment** out);
QOBF_API qobf_status qobf_experiment_set(qobf_experiment* experiment,
                                         const char* key, const char* value);
/* skipped_queries may be NULL. */
QOBF_API qobf_status qobf_experiment_run(const qobf_experiment* experiment,
                                         const char* command,
                                         size_t* skipped_queries);
QOBF_API void qobf_experiment_free(qobf_experiment* experiment);

#ifdef __cplusplus
}
#endif

#endif /* QOBF_QOBF_H_ */
