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

#include "qobf/embeddings.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "qobf/error.hpp"
#include "qobf/oracle.hpp"
#include "test_support.hpp"

namespace qobf {
namespace {

EmbeddingStore ParseText(const std::string& text, std::optional<std::size_t> dim = {}) {
  std::istringstream in(text);
  return EmbeddingStore::Parse(in, dim);
}

ErrorCode ParseError(const std::string& text, std::optional<std::size_t> dim = {}) {
  try {
    ParseText(text, dim);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kOk;
}

// w* = (1,0), a = (0.99,0.1), b = (0.7,0.7), c = (0,1), d = (-1,0)
EmbeddingStore ToyStore() {
  return EmbeddingStore::FromRows({"w*", "a", "b", "c", "d"},
                                  {{1, 0}, {0.99, 0.1}, {0.7, 0.7}, {0, 1}, {-1, 0}});
}

std::vector<std::string> Words(const std::vector<ScoredWord>& ranked) {
  std::vector<std::string> out;
  for (const auto& r : ranked) out.push_back(r.word);
  return out;
}

TEST(EmbeddingStore, ParsesSmallFile) {
  const auto store = ParseText("cat 1 0\ndog 0.5 0.5\nfish 0 1\n", 2);
  EXPECT_EQ(store.size(), 3u);
  EXPECT_EQ(store.dimension(), 2u);
  EXPECT_TRUE(store.Contains("dog"));
  EXPECT_FALSE(store.Contains("bird"));
  EXPECT_DOUBLE_EQ(store.Vector("dog")[1], 0.5);
}

TEST(EmbeddingStore, RejectsWrongArity) {
  EXPECT_EQ(ParseError("cat 1 0\ndog 1 2 3\n", 2), ErrorCode::kParse);
  EXPECT_EQ(ParseError("cat 1 0\ndog 1 2 3\n"), ErrorCode::kParse);
  try {
    ParseText("cat 1 0\ndog 1 2 3\n", 2);
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
  }
}

TEST(EmbeddingStore, RejectsDuplicateWord) {
  EXPECT_EQ(ParseError("cat 1 0\ndog 0 1\ncat 1 1\n"), ErrorCode::kDuplicate);
}

TEST(EmbeddingStore, RejectsNonNumericAndEmpty) {
  EXPECT_EQ(ParseError("cat 1 x\n"), ErrorCode::kParse);
  EXPECT_EQ(ParseError(""), ErrorCode::kParse);
}

TEST(EmbeddingStore, CaseVariantsKeepFirst) {
  const auto store = ParseText("Paris 1 0\nparis 0 1\n");
  EXPECT_EQ(store.size(), 1u);
  EXPECT_DOUBLE_EQ(store.Vector("paris")[0], 1.0);
}

TEST(EmbeddingStore, OutOfVocabularyLookupFails) {
  const auto store = ToyStore();
  try {
    store.Vector("zebra");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOutOfVocabulary);
  }
}

TEST(Cosine, Examples) {
  const std::vector<double> x{1, 0}, y{0, 1}, z{1, 1};
  EXPECT_DOUBLE_EQ(CosineSimilarity(x, x), 1.0);
  EXPECT_DOUBLE_EQ(CosineSimilarity(x, y), 0.0);
  EXPECT_NEAR(CosineSimilarity(x, z), 0.70710678118654752, 1e-9);
  const std::vector<double> zero{0, 0};
  EXPECT_THROW(CosineSimilarity(x, zero), Error);
}

TEST(Euclidean, Examples) {
  const std::vector<double> o{0, 0}, p{3, 4};
  EXPECT_DOUBLE_EQ(EuclideanDistance(o, o), 0.0);
  EXPECT_DOUBLE_EQ(EuclideanDistance(o, p), 5.0);
  std::mt19937_64 gen(5);
  std::normal_distribution<double> normal;
  std::vector<double> a(5), b(5);
  for (auto& v : a) v = normal(gen);
  for (auto& v : b) v = normal(gen);
  double sum = 0.0;
  for (int i = 0; i < 5; ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  EXPECT_NEAR(EuclideanDistance(a, b), std::sqrt(sum), 1e-12);
}

TEST(Ranking, ToyAngle) {
  const auto store = ToyStore();
  EXPECT_EQ(Words(store.RankBySimilarity("w*", SimilarityMeasure::kAngle, 3)),
            (std::vector<std::string>{"w*", "a", "b"}));
}

TEST(Ranking, ToyDistanceAscending) {
  const auto store = ToyStore();
  // Distances from w*: a 0.1005, b 0.7616, c 1.4142, d 2.
  EXPECT_EQ(Words(store.RankBySimilarity("w*", SimilarityMeasure::kDistance, 5)),
            (std::vector<std::string>{"w*", "a", "b", "c", "d"}));
}

TEST(Ranking, FullCountIsPermutation) {
  const auto store = ToyStore();
  for (auto m : {SimilarityMeasure::kAngle, SimilarityMeasure::kDistance,
                 SimilarityMeasure::kProduct}) {
    auto words = Words(store.RankBySimilarity("c", m, store.size()));
    auto vocab = store.vocabulary();
    std::sort(words.begin(), words.end());
    std::sort(vocab.begin(), vocab.end());
    EXPECT_EQ(words, vocab);
  }
}

TEST(Ranking, TiesBrokenByWord) {
  const auto store =
      EmbeddingStore::FromRows({"p", "z", "y", "x"}, {{1, 0}, {0, 1}, {0, 1}, {0, 1}});
  EXPECT_EQ(Words(store.RankBySimilarity("p", SimilarityMeasure::kAngle, 4)),
            (std::vector<std::string>{"p", "x", "y", "z"}));
}

TEST(Ranking, MatchesBruteForceOnRandomStores) {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const auto store = testing::GaussianStore(60, 7, seed);
    for (auto m : {SimilarityMeasure::kAngle, SimilarityMeasure::kDistance,
                   SimilarityMeasure::kProduct}) {
      const auto& probe = store.word(seed % store.size());
      EXPECT_EQ(Words(store.RankBySimilarity(probe, m, 25)),
                Words(oracle::RankBySimilarity(store, probe, m, 25)));
    }
  }
}

TEST(Measures, ParseNames) {
  EXPECT_EQ(ParseMeasure("angle"), SimilarityMeasure::kAngle);
  EXPECT_EQ(ParseMeasure("D"), SimilarityMeasure::kDistance);
  EXPECT_EQ(ParseMeasure("product"), SimilarityMeasure::kProduct);
  EXPECT_THROW(ParseMeasure("jaccard"), Error);
}

TEST(EmbeddingStore, NearestAndMean) {
  const auto store = ToyStore();
  const std::vector<double> point{0.1, 0.95};
  EXPECT_EQ(store.word(store.Nearest(point)), "c");
  const std::vector<std::string> tokens{"w*", "c", "unknown"};
  const auto mean = store.MeanVector(tokens);
  ASSERT_TRUE(mean);
  EXPECT_DOUBLE_EQ((*mean)[0], 0.5);
  EXPECT_DOUBLE_EQ((*mean)[1], 0.5);
  const std::vector<std::string> none{"unknown"};
  EXPECT_FALSE(store.MeanVector(none));
}

TEST(EmbeddingStore, LoadsFixture) {
  const auto store = EmbeddingStore::Load(testing::FixtureDir() / "embeddings.txt", 16);
  EXPECT_GT(store.size(), 100u);
  EXPECT_THROW(EmbeddingStore::Load(testing::FixtureDir() / "embeddings.txt", 3), Error);
  EXPECT_THROW(EmbeddingStore::Load("/nonexistent/embeddings.txt"), Error);
}

}  // namespace
}  // namespace qobf
