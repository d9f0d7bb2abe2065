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

#ifndef QOBF_WBB_HPP_
#define QOBF_WBB_HPP_

#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qobf/embeddings.hpp"
#include "qobf/mechanism.hpp"
#include "qobf/preprocess.hpp"
#include "qobf/random.hpp"

namespace qobf {

// Parameters of the box mechanism. `k` words around the probe form the safe
// box and are never emitted; the next `n` form the candidate box that is
// sampled with the exponential mechanism at budget `epsilon`.
struct MechanismConfig {
  std::size_t k = 4;
  std::size_t n = 50;
  double epsilon = 10.0;
  SimilarityMeasure measure = SimilarityMeasure::kAngle;

  // Throws kInvalidArgument when n == 0, epsilon < 0 or not finite, or
  // k + n exceeds the vocabulary size. epsilon == 0 is accepted and yields
  // uniform sampling.
  void Validate(std::size_t vocabulary_size) const;
};

// Sensitivity of the sigmoid utility; the utility lives in (0, 1).
inline constexpr double kUtilitySensitivity = 1.0;

// u = 1 / (1 + e^z). Larger z-scores (more similar candidates) get lower
// utility.
double Utility(double z_score);

// (s - mean) / sigma with the population standard deviation. A constant
// input (sigma == 0) gives all zeros.
std::vector<double> ZScores(std::span<const double> similarities);

// Exponential mechanism over the utilities:
// p_i = exp(eps * u_i / 2) / sum_j exp(eps * u_j / 2), max-shifted.
std::vector<double> SamplingDistribution(std::span<const double> utilities,
                                         double epsilon);

// Inverse-CDF draw from a probability vector.
std::size_t SampleIndex(std::span<const double> probabilities, RandomStream& rng);

struct Candidate {
  std::string word;
  double similarity = 0.0;
  double z_score = 0.0;
  double utility = 0.0;
  double probability = 0.0;
};

struct CandidateBox {
  std::string probe;
  MechanismConfig config;
  std::vector<std::string> safe_box;
  std::vector<Candidate> candidates;

  bool InSafeBox(std::string_view word) const;
  std::vector<double> Probabilities() const;
  // JSON diagnostic record with the config and (word, s, z, u, p) per
  // candidate.
  std::string ToJson() const;
};

// Safe box = ranks 1..k, candidates = ranks k+1..k+n under config.measure.
// Throws kOutOfVocabulary for an unknown probe.
CandidateBox BuildBoxes(std::string_view probe, const MechanismConfig& config,
                        const EmbeddingStore& store);

// Completes a box from an already ranked list of at least k + n words.
CandidateBox BoxFromRanking(std::string_view probe, const MechanismConfig& config,
                            std::span<const ScoredWord> ranking);

const std::string& SampleWord(const CandidateBox& box, RandomStream& rng);

// Replaces every target token through BuildBoxes + SampleWord.
ObfuscationResult ObfuscateQuery(const TaggedQuery& query,
                                 const MechanismConfig& config,
                                 const EmbeddingStore& store, RandomStream& rng);

std::vector<ObfuscationResult> ObfuscateBatch(const TaggedQuery& query,
                                              const MechanismConfig& config,
                                              const EmbeddingStore& store,
                                              std::size_t count, uint64_t seed,
                                              std::string_view query_id = "");

// Mechanism adapter with a per-probe box cache.
class WbbMechanism final : public Mechanism {
 public:
  using BoxBuilder = CandidateBox (*)(std::string_view, const MechanismConfig&,
                                      const EmbeddingStore&);

  WbbMechanism(const EmbeddingStore& store, MechanismConfig config,
               BoxBuilder builder = &BuildBoxes);

  std::string name() const override { return "wbb"; }
  double epsilon() const override { return config_.epsilon; }
  const MechanismConfig& config() const { return config_; }

  std::string ObfuscateWord(std::string_view word, RandomStream& rng) const override;
  bool Perturbs(const TaggedToken& token) const override { return token.target; }

  std::shared_ptr<const CandidateBox> Box(std::string_view probe) const;

 private:
  const EmbeddingStore& store_;
  MechanismConfig config_;
  BoxBuilder builder_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<std::string, std::shared_ptr<const CandidateBox>> cache_;
};

}  // namespace qobf

#endif  // QOBF_WBB_HPP_
