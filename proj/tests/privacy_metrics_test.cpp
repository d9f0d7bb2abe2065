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

#include <gtest/gtest.h>

#include <cmath>
#include <nlohmann/json.hpp>

#include "qobf/error.hpp"
#include "qobf/wbb.hpp"
#include "test_support.hpp"

namespace qobf {
namespace {

using Tokens = std::vector<std::string>;

double J(const Tokens& a, const Tokens& b) { return Jaccard(a, b); }

TEST(Jaccard, Examples) {
  EXPECT_EQ(J({"a", "b"}, {"b", "a"}), 1.0);
  EXPECT_EQ(J({"a"}, {"b"}), 0.0);
  EXPECT_EQ(J({"a", "b", "c"}, {"b", "c", "d"}), 0.5);
  EXPECT_EQ(J({}, {}), 1.0);
  EXPECT_EQ(J({"a", "a", "b"}, {"a", "b", "b"}), 1.0);
}

TEST(TargetJaccard, PositionalOverTargets) {
  ObfuscationResult r;
  r.original.tokens = {{"skin", "noun", true, true}, {"for", "stop", false, true},
                       {"cancer", "noun", true, true}};
  r.tokens = {"cancer", "for", "skin"};
  // Swapped targets share no (position, word) pair.
  EXPECT_EQ(TargetJaccard(r), 0.0);
  r.tokens = {"skin", "for", "tumor"};
  EXPECT_NEAR(TargetJaccard(r), 1.0 / 3.0, 1e-15);
  r.original.tokens = {{"for", "stop", false, true}};
  r.tokens = {"for"};
  EXPECT_EQ(TargetJaccard(r), 1.0);
}

TEST(SemanticSimilarity, Examples) {
  const auto store = EmbeddingStore::FromRows({"x", "y", "z"}, {{1, 0}, {0, 1}, {1, 1}});
  const Tokens xy{"x", "y"}, x{"x"}, y{"y"}, z{"z"}, xz{"x", "z"}, oov{"oov"};
  EXPECT_NEAR(SemanticSimilarity(xy, xy, store), 1.0, 1e-12);
  EXPECT_NEAR(SemanticSimilarity(x, y, store), 0.0, 1e-12);
  // mean(x, y) = (0.5, 0.5), mean(x, z) = (1, 0.5): cos = 0.75 / (0.7071 * 1.1180)
  const double expected = 0.75 / (std::sqrt(0.5) * std::sqrt(1.25));
  EXPECT_NEAR(SemanticSimilarity(xy, xz, store), expected, 1e-9);
  EXPECT_NEAR(SemanticSimilarity(xz, xy, store), expected, 1e-9);
  try {
    SemanticSimilarity(oov, x, store);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUndefinedMetric);
  }
}

TEST(FailureRate, WbbNeverReturnsInput) {
  const auto store = testing::GaussianStore(200, 8, 2);
  for (auto m : {SimilarityMeasure::kAngle, SimilarityMeasure::kDistance,
                 SimilarityMeasure::kProduct}) {
    for (double eps : {0.0, 1.0, 50.0}) {
      MechanismConfig config;
      config.k = 1;
      config.n = 30;
      config.epsilon = eps;
      config.measure = m;
      const WbbMechanism mechanism(store, config);
      RandomStream rng(1, 1);
      EXPECT_EQ(EstimateFailureRate("w0003", mechanism, 5000, rng), 0.0);
    }
  }
}

TEST(FailureRate, IdentityAlwaysFails) {
  const IdentityMechanism none;
  RandomStream rng(1, 1);
  EXPECT_EQ(EstimateFailureRate("x", none, 10, rng), 1.0);
  EXPECT_THROW(EstimateFailureRate("x", none, 0, rng), Error);
}

TEST(SupportSize, UniformBoxCoversAllCandidates) {
  const auto store = testing::GaussianStore(100, 6, 3);
  MechanismConfig config;
  config.k = 4;
  config.n = 10;
  config.epsilon = 0.0;
  const WbbMechanism mechanism(store, config);
  RandomStream rng(2, 2);
  EXPECT_EQ(EstimateSupportSize("w0001", mechanism, 0.01, 20000, rng), 10u);
  config.n = 1;
  const WbbMechanism single(store, config);
  EXPECT_EQ(EstimateSupportSize("w0001", single, 0.01, 20000, rng), 1u);
  EXPECT_THROW(EstimateSupportSize("w0001", single, 0.01, 50, rng), Error);
}

// Two candidates with p = (0.99, 0.01): the top word alone covers 95%.
class SkewedMechanism final : public Mechanism {
 public:
  std::string name() const override { return "skewed"; }
  double epsilon() const override { return 1.0; }
  std::string ObfuscateWord(std::string_view, RandomStream& rng) const override {
    return rng.Uniform() < 0.99 ? "top" : "tail";
  }
  bool Perturbs(const TaggedToken&) const override { return true; }
};

TEST(SupportSize, SkewedDistribution) {
  const SkewedMechanism mechanism;
  RandomStream rng(3, 3);
  EXPECT_EQ(EstimateSupportSize("w", mechanism, 0.05, 10000, rng), 1u);
}

TEST(Summarize, SampleStandardDeviation) {
  const std::vector<double> v{1, 2, 3, 4};
  const auto s = Summarize(v);
  EXPECT_EQ(s.count, 4u);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.stddev, std::sqrt(5.0 / 3.0), 1e-12);
  EXPECT_EQ(Summarize(std::vector<double>{7}).stddev, 0.0);
}

TEST(PrivacyReport, IdentityScoresOne) {
  const auto store = testing::GaussianStore(20, 3, 1);
  TaggedQuery q;
  q.tokens = {{"w0001", "noun", true, true}, {"w0002", "noun", true, true}};
  const IdentityMechanism none;
  const auto batch = ObfuscateBatch(none, q, 5, 1, "q");
  PrivacyReport report;
  report.records.push_back(ScoreReplicates("q", "none", 0.0, batch, store));
  report.Aggregate();
  ASSERT_EQ(report.aggregates.size(), 1u);
  EXPECT_EQ(report.aggregates[0].jaccard.mean, 1.0);
  EXPECT_EQ(report.aggregates[0].target_jaccard.mean, 1.0);
  EXPECT_NEAR(report.aggregates[0].semantic_similarity.mean, 1.0, 1e-12);
  const auto json = nlohmann::json::parse(report.ToJson());
  EXPECT_EQ(json["records"].size(), 1u);
  EXPECT_NE(report.RecordsTsv().find("q\tnone"), std::string::npos);
}

}  // namespace
}  // namespace qobf
