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

// Exercises the shared library through its C interface only.

#include "qobf/qobf.h"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>

namespace {

std::string Fixture(const char* name) {
  return (std::filesystem::path(QOBF_FIXTURE_DIR) / name).string();
}

class CApi : public ::testing::Test {
 protected:
  void SetUp() override {
    ASSERT_EQ(qobf_embeddings_load(Fixture("embeddings.txt").c_str(), 16, &store_), QOBF_OK);
    ASSERT_EQ(qobf_lexicon_load(Fixture("lexicon.txt").c_str(),
                                Fixture("stopwords.txt").c_str(), &lexicon_),
              QOBF_OK);
  }
  void TearDown() override {
    qobf_lexicon_free(lexicon_);
    qobf_embeddings_free(store_);
  }

  qobf_embeddings* store_ = nullptr;
  qobf_lexicon* lexicon_ = nullptr;
};

TEST_F(CApi, ErrorsAreReported) {
  qobf_embeddings* store = nullptr;
  EXPECT_EQ(qobf_embeddings_load("/nonexistent/e.txt", 0, &store), QOBF_ERR_IO);
  EXPECT_EQ(store, nullptr);
  EXPECT_GT(std::strlen(qobf_last_error()), 0u);
  EXPECT_EQ(qobf_embeddings_load(Fixture("embeddings.txt").c_str(), 3, &store),
            QOBF_ERR_PARSE);
  EXPECT_EQ(qobf_embeddings_load(nullptr, 0, &store), QOBF_ERR_INVALID_ARGUMENT);
  EXPECT_STREQ(qobf_status_name(QOBF_ERR_OUT_OF_VOCABULARY), "out of vocabulary");
  double sim = 0.0;
  EXPECT_EQ(qobf_embeddings_similarity(store_, "cancer", "zebra", QOBF_MEASURE_ANGLE, &sim),
            QOBF_ERR_OUT_OF_VOCABULARY);
}

TEST_F(CApi, EmbeddingQueries) {
  EXPECT_EQ(qobf_embeddings_dim(store_), 16u);
  EXPECT_TRUE(qobf_embeddings_contains(store_, "cancer"));
  EXPECT_FALSE(qobf_embeddings_contains(store_, "zebra"));
  double sim = 0.0;
  ASSERT_EQ(qobf_embeddings_similarity(store_, "cancer", "cancer", QOBF_MEASURE_ANGLE, &sim),
            QOBF_OK);
  EXPECT_NEAR(sim, 1.0, 1e-12);
  qobf_ranking* ranking = nullptr;
  ASSERT_EQ(qobf_embeddings_rank(store_, "cancer", QOBF_MEASURE_DISTANCE, 5, &ranking), QOBF_OK);
  EXPECT_EQ(qobf_ranking_size(ranking), 5u);
  EXPECT_STREQ(qobf_ranking_word(ranking, 0), "cancer");
  EXPECT_GE(qobf_ranking_score(ranking, 1), qobf_ranking_score(ranking, 2));
  qobf_ranking_free(ranking);
}

TEST_F(CApi, MechanismPrimitives) {
  EXPECT_EQ(qobf_utility(0.0), 0.5);
  const double u[2] = {1.0, 0.0};
  double p[2];
  ASSERT_EQ(qobf_sampling_distribution(u, 2, 2.0, p), QOBF_OK);
  EXPECT_NEAR(p[0], 0.7311, 1e-4);
  qobf_box* box = nullptr;
  ASSERT_EQ(qobf_box_build(store_, "cancer", 4, 20, 10.0, QOBF_MEASURE_ANGLE, &box), QOBF_OK);
  EXPECT_EQ(qobf_box_safe_size(box), 4u);
  EXPECT_STREQ(qobf_box_safe_word(box, 0), "cancer");
  ASSERT_EQ(qobf_box_candidate_count(box), 20u);
  double total = 0.0;
  for (size_t i = 0; i < 20; ++i) {
    qobf_candidate c;
    ASSERT_EQ(qobf_box_candidate(box, i, &c), QOBF_OK);
    total += c.probability;
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  qobf_candidate c;
  EXPECT_EQ(qobf_box_candidate(box, 20, &c), QOBF_ERR_INVALID_ARGUMENT);
  EXPECT_NE(std::string(qobf_box_json(box)).find("\"candidates\""), std::string::npos);
  qobf_box_free(box);
  EXPECT_EQ(qobf_box_build(store_, "cancer", 4, 500, 1.0, QOBF_MEASURE_ANGLE, &box),
            QOBF_ERR_INVALID_ARGUMENT);
}

TEST_F(CApi, ObfuscateIsDeterministic) {
  qobf_mechanism_params params{QOBF_MECHANISM_WBB, 4, 20, 10.0, QOBF_MEASURE_ANGLE, 0.5};
  qobf_obfuscation *a = nullptr, *b = nullptr;
  ASSERT_EQ(qobf_obfuscate(store_, lexicon_, &params, "Treatment for skin cancer", 42, "q1", 3,
                           &a),
            QOBF_OK);
  ASSERT_EQ(qobf_obfuscate(store_, lexicon_, &params, "Treatment for skin cancer", 42, "q1", 3,
                           &b),
            QOBF_OK);
  EXPECT_STREQ(qobf_obfuscation_text(a), qobf_obfuscation_text(b));
  EXPECT_EQ(qobf_obfuscation_stream(a), qobf_obfuscation_stream(b));
  EXPECT_STREQ(qobf_obfuscation_normalized(a), "treatment for skin cancer");
  EXPECT_STREQ(qobf_obfuscation_provenance(a), "RNRR");
  double j = 1.0;
  ASSERT_EQ(qobf_jaccard("treatment for skin cancer", qobf_obfuscation_text(a), &j), QOBF_OK);
  EXPECT_LT(j, 1.0);
  qobf_obfuscation_free(a);
  qobf_obfuscation_free(b);

  params.kind = QOBF_MECHANISM_NONE;
  ASSERT_EQ(qobf_obfuscate(store_, nullptr, &params, "Skin cancer", 1, "q", 0, &a), QOBF_OK);
  EXPECT_STREQ(qobf_obfuscation_text(a), "skin cancer");
  qobf_obfuscation_free(a);
}

TEST_F(CApi, SemanticSimilarity) {
  double s = 0.0;
  ASSERT_EQ(qobf_semantic_similarity(store_, "skin cancer", "Skin  cancer!", &s), QOBF_OK);
  EXPECT_NEAR(s, 1.0, 1e-12);
  EXPECT_EQ(qobf_semantic_similarity(store_, "zebra", "cancer", &s),
            QOBF_ERR_UNDEFINED_METRIC);
}

TEST_F(CApi, Retrieval) {
  qobf_corpus* corpus = nullptr;
  ASSERT_EQ(qobf_corpus_load(Fixture("corpus.jsonl").c_str(), store_, &corpus), QOBF_OK);
  EXPECT_EQ(qobf_corpus_size(corpus), 20u);
  qobf_qrels* qrels = nullptr;
  ASSERT_EQ(qobf_qrels_load(Fixture("qrels.txt").c_str(), &qrels), QOBF_OK);
  for (auto scorer : {QOBF_SCORER_BM25, QOBF_SCORER_TFIDF, QOBF_SCORER_EMBEDDING}) {
    qobf_run* run = nullptr;
    ASSERT_EQ(qobf_corpus_search(corpus, scorer, "treatment for skin cancer", 10, "q1", &run),
              QOBF_OK);
    ASSERT_GT(qobf_run_size(run), 0u);
    EXPECT_GE(qobf_run_score(run, 0), qobf_run_score(run, qobf_run_size(run) - 1));
    EXPECT_EQ(std::string(qobf_run_trec(run)).rfind("q1 Q0 ", 0), 0u);
    double ndcg = -1.0, recall = -1.0;
    ASSERT_EQ(qobf_ndcg(run, qrels, 10, &ndcg), QOBF_OK);
    ASSERT_EQ(qobf_recall(run, qrels, &recall), QOBF_OK);
    EXPECT_GE(ndcg, 0.0);
    EXPECT_LE(ndcg, 1.0);
    qobf_run_free(run);
  }
  qobf_run* run = nullptr;
  ASSERT_EQ(qobf_corpus_search(corpus, QOBF_SCORER_BM25, "cancer", 10, "nojudgments", &run),
            QOBF_OK);
  double ndcg = 0.0;
  EXPECT_EQ(qobf_ndcg(run, qrels, 10, &ndcg), QOBF_ERR_UNDEFINED_METRIC);
  qobf_run_free(run);
  qobf_qrels_free(qrels);
  qobf_corpus_free(corpus);
}

TEST_F(CApi, ExperimentLifecycle) {
  qobf_experiment* experiment = nullptr;
  ASSERT_EQ(qobf_experiment_load(Fixture("config.ini").c_str(), &experiment), QOBF_OK);
  const auto out = std::filesystem::temp_directory_path() / "qobf_capi_experiment";
  std::filesystem::remove_all(out);
  ASSERT_EQ(qobf_experiment_set(experiment, "run.out", out.c_str()), QOBF_OK);
  EXPECT_EQ(qobf_experiment_set(experiment, "run.nope", "1"), QOBF_ERR_INVALID_ARGUMENT);
  size_t skipped = 99;
  ASSERT_EQ(qobf_experiment_run(experiment, "privacy-eval", &skipped), QOBF_OK);
  EXPECT_EQ(skipped, 0u);
  EXPECT_TRUE(std::filesystem::exists(out / "privacy_summary.tsv"));
  EXPECT_EQ(qobf_experiment_run(experiment, "dance", &skipped), QOBF_ERR_INVALID_ARGUMENT);
  qobf_experiment_free(experiment);
}

}  // namespace
