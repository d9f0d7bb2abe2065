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

#include "qobf/wbb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <numeric>

#include "qobf/error.hpp"

namespace qobf {

void MechanismConfig::Validate(std::size_t vocabulary_size) const {
  if (n == 0) Fail(ErrorCode::kInvalidArgument, "candidate box size n must be >= 1");
  if (!std::isfinite(epsilon) || epsilon < 0.0) {
    Fail(ErrorCode::kInvalidArgument, "epsilon must be finite and non-negative");
  }
  if (k + n > vocabulary_size) {
    Fail(ErrorCode::kInvalidArgument,
         "k + n = " + std::to_string(k + n) + " exceeds the vocabulary size " +
             std::to_string(vocabulary_size));
  }
}

double Utility(double z_score) { return 1.0 / (1.0 + std::exp(z_score)); }

std::vector<double> ZScores(std::span<const double> similarities) {
  std::vector<double> z(similarities.size(), 0.0);
  if (similarities.empty()) return z;
  const double count = static_cast<double>(similarities.size());
  const double mean =
      std::accumulate(similarities.begin(), similarities.end(), 0.0) / count;
  double squares = 0.0;
  for (double s : similarities) squares += (s - mean) * (s - mean);
  const double sigma = std::sqrt(squares / count);
  if (sigma == 0.0) return z;
  for (std::size_t i = 0; i < similarities.size(); ++i) {
    z[i] = (similarities[i] - mean) / sigma;
  }
  return z;
}

std::vector<double> SamplingDistribution(std::span<const double> utilities,
                                         double epsilon) {
  if (utilities.empty()) Fail(ErrorCode::kInvalidArgument, "no candidates to sample from");
  if (!std::isfinite(epsilon) || epsilon < 0.0) {
    Fail(ErrorCode::kInvalidArgument, "epsilon must be finite and non-negative");
  }
  const double scale = epsilon / (2.0 * kUtilitySensitivity);
  std::vector<double> p(utilities.size());
  double top = -std::numeric_limits<double>::infinity();
  for (double u : utilities) top = std::max(top, scale * u);
  double total = 0.0;
  for (std::size_t i = 0; i < utilities.size(); ++i) {
    p[i] = std::exp(scale * utilities[i] - top);
    total += p[i];
  }
  for (double& x : p) x /= total;
  return p;
}

std::size_t SampleIndex(std::span<const double> probabilities, RandomStream& rng) {
  if (probabilities.empty()) Fail(ErrorCode::kInvalidArgument, "empty distribution");
  const double draw = rng.Uniform();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] <= 0.0) continue;
    last_positive = i;
    cumulative += probabilities[i];
    if (draw < cumulative) return i;
  }
  // Rounding left the cumulative sum just below 1.
  return last_positive;
}

bool CandidateBox::InSafeBox(std::string_view word) const {
  return std::find(safe_box.begin(), safe_box.end(), word) != safe_box.end();
}

std::vector<double> CandidateBox::Probabilities() const {
  std::vector<double> p;
  p.reserve(candidates.size());
  for (const auto& c : candidates) p.push_back(c.probability);
  return p;
}

std::string CandidateBox::ToJson() const {
  nlohmann::ordered_json record;
  record["probe"] = probe;
  record["k"] = config.k;
  record["n"] = config.n;
  record["epsilon"] = config.epsilon;
  record["measure"] = MeasureName(config.measure);
  record["safe_box"] = safe_box;
  auto& rows = record["candidates"] = nlohmann::ordered_json::array();
  for (const auto& c : candidates) {
    rows.push_back({{"word", c.word},
                    {"s", c.similarity},
                    {"z", c.z_score},
                    {"u", c.utility},
                    {"p", c.probability}});
  }
  return record.dump();
}

CandidateBox BoxFromRanking(std::string_view probe, const MechanismConfig& config,
                            std::span<const ScoredWord> ranking) {
  if (ranking.size() < config.k + config.n) {
    Fail(ErrorCode::kInvalidArgument, "ranking shorter than k + n");
  }
  CandidateBox box;
  box.probe = std::string(probe);
  box.config = config;
  for (std::size_t i = 0; i < config.k; ++i) box.safe_box.push_back(ranking[i].word);

  std::vector<double> similarities;
  for (std::size_t i = config.k; i < config.k + config.n; ++i) {
    similarities.push_back(ranking[i].score);
  }
  const auto z = ZScores(similarities);
  std::vector<double> utilities;
  for (double value : z) utilities.push_back(Utility(value));
  const auto p = SamplingDistribution(utilities, config.epsilon);
  for (std::size_t i = 0; i < config.n; ++i) {
    box.candidates.push_back({ranking[config.k + i].word, similarities[i], z[i],
                              utilities[i], p[i]});
  }
  return box;
}

CandidateBox BuildBoxes(std::string_view probe, const MechanismConfig& config,
                        const EmbeddingStore& store) {
  if (!store.Contains(probe)) {
    Fail(ErrorCode::kOutOfVocabulary,
         "probe '" + std::string(probe) + "' is not in the vocabulary");
  }
  config.Validate(store.size());
  const auto ranking =
      store.RankBySimilarity(probe, config.measure, config.k + config.n);
  return BoxFromRanking(probe, config, ranking);
}

const std::string& SampleWord(const CandidateBox& box, RandomStream& rng) {
  const auto p = box.Probabilities();
  return box.candidates[SampleIndex(p, rng)].word;
}

ObfuscationResult ObfuscateQuery(const TaggedQuery& query,
                                 const MechanismConfig& config,
                                 const EmbeddingStore& store, RandomStream& rng) {
  return WbbMechanism(store, config).ObfuscateQuery(query, rng);
}

std::vector<ObfuscationResult> ObfuscateBatch(const TaggedQuery& query,
                                              const MechanismConfig& config,
                                              const EmbeddingStore& store,
                                              std::size_t count, uint64_t seed,
                                              std::string_view query_id) {
  return ObfuscateBatch(WbbMechanism(store, config), query, count, seed, query_id);
}

WbbMechanism::WbbMechanism(const EmbeddingStore& store, MechanismConfig config,
                           BoxBuilder builder)
    : store_(store), config_(config), builder_(builder) {
  config_.Validate(store_.size());
}

std::shared_ptr<const CandidateBox> WbbMechanism::Box(std::string_view probe) const {
  const std::string key(probe);
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  auto box = std::make_shared<const CandidateBox>(builder_(probe, config_, store_));
  std::lock_guard lock(mutex_);
  return cache_.emplace(key, std::move(box)).first->second;
}

std::string WbbMechanism::ObfuscateWord(std::string_view word,
                                        RandomStream& rng) const {
  return SampleWord(*Box(word), rng);
}

}  // namespace qobf
