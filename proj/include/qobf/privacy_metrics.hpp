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

#ifndef QOBF_PRIVACY_METRICS_HPP_
#define QOBF_PRIVACY_METRICS_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qobf/embeddings.hpp"
#include "qobf/mechanism.hpp"
#include "qobf/random.hpp"

namespace qobf {

// |A n B| / |A u B| over token sets. Two empty sets give 1.
double Jaccard(std::span<const std::string> original,
               std::span<const std::string> obfuscated);

// Jaccard over the (position, word) pairs of the target tokens only. It is
// zero exactly when no target token was left in place, whatever the other
// tokens of the query contain. Queries without targets give 1.
double TargetJaccard(const ObfuscationResult& result);

// Cosine of the mean-pooled in-vocabulary vectors of both sides. Throws
// kUndefinedMetric when a side has no in-vocabulary token.
double SemanticSimilarity(std::span<const std::string> original,
                          std::span<const std::string> obfuscated,
                          const EmbeddingStore& store);

// Monte Carlo estimate of Pr[M(w) = w].
double EstimateFailureRate(std::string_view word, const Mechanism& mechanism,
                           std::size_t trials, RandomStream& rng);

// Smallest number of distinct outputs whose empirical mass reaches 1 - eta.
// Requires trials >= 100 / eta so the tail is resolvable.
std::size_t EstimateSupportSize(std::string_view word, const Mechanism& mechanism,
                                double eta, std::size_t trials, RandomStream& rng);

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for count < 2
};

Summary Summarize(std::span<const double> values);

// One row per (query, mechanism, epsilon): replicate means.
struct PrivacyRecord {
  std::string query_id;
  std::string mechanism;
  double epsilon = 0.0;
  std::size_t replicates = 0;
  double jaccard = 0.0;
  double target_jaccard = 0.0;
  // nullopt when a side had no in-vocabulary token.
  std::optional<double> semantic_similarity;
};

struct PrivacyAggregate {
  std::string mechanism;
  double epsilon = 0.0;
  Summary jaccard;
  Summary target_jaccard;
  Summary semantic_similarity;
};

struct PrivacyReport {
  std::vector<PrivacyRecord> records;
  std::vector<PrivacyAggregate> aggregates;

  // Groups records by (mechanism, epsilon) in first-seen order.
  void Aggregate();
  std::string RecordsTsv() const;
  std::string AggregatesTsv() const;
  std::string ToJson() const;
};

// Scores a batch of replicates of one query.
PrivacyRecord ScoreReplicates(std::string_view query_id, std::string_view mechanism,
                              double epsilon,
                              std::span<const ObfuscationResult> replicates,
                              const EmbeddingStore& store);

}  // namespace qobf

#endif  // QOBF_PRIVACY_METRICS_HPP_
