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

#ifndef QOBF_BASELINES_HPP_
#define QOBF_BASELINES_HPP_

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

// Noise-addition baselines: perturb the word vector, emit the nearest
// vocabulary word.
enum class NoiseVariant { kCmp, kMahalanobis };

struct NoiseMechanismConfig {
  double epsilon = 1.0;
  NoiseVariant variant = NoiseVariant::kCmp;
  // Regularization weight in [0, 1]; only read for kMahalanobis.
  double lambda = 0.5;

  void Validate() const;
};

// Uniform direction on the unit (dim-1)-sphere (normalized Gaussian).
std::vector<double> SampleUnitDirection(std::size_t dim, RandomStream& rng);

// Magnitude ~ Gamma(shape = dim, scale = 1 / epsilon).
double SampleNoiseMagnitude(std::size_t dim, double epsilon, RandomStream& rng);

// Multivariate Laplace noise: magnitude * direction. The direction is drawn
// first, then the magnitude.
std::vector<double> SampleCmpNoise(std::size_t dim, double epsilon,
                                   RandomStream& rng);

// Shaping matrix (lambda * S + (1 - lambda) * I)^(1/2), where S is the
// vocabulary covariance rescaled to unit mean variance.
class MahalanobisShaper {
 public:
  // Throws kInvalidArgument when lambda is outside [0, 1] or the shaping
  // matrix is singular.
  MahalanobisShaper(const EmbeddingStore& store, double lambda);

  std::size_t dimension() const { return dim_; }
  double lambda() const { return lambda_; }
  // Row-major dim x dim.
  const std::vector<double>& matrix() const { return matrix_; }

  // M * direction, renormalized to unit length.
  std::vector<double> ShapeDirection(std::span<const double> direction) const;

 private:
  std::size_t dim_;
  double lambda_;
  std::vector<double> matrix_;
};

std::vector<double> SampleMahalanobisNoise(const MahalanobisShaper& shaper,
                                           double epsilon, RandomStream& rng);

// Nearest vocabulary word to phi(word) + noise.
std::string NearestToPerturbed(std::string_view word,
                               std::span<const double> noise,
                               const EmbeddingStore& store);

std::string CmpObfuscateWord(std::string_view word, double epsilon,
                             const EmbeddingStore& store, RandomStream& rng);

std::string MahalanobisObfuscateWord(std::string_view word, double epsilon,
                                     const MahalanobisShaper& shaper,
                                     const EmbeddingStore& store,
                                     RandomStream& rng);

class NoiseMechanism final : public Mechanism {
 public:
  NoiseMechanism(const EmbeddingStore& store, NoiseMechanismConfig config);

  std::string name() const override;
  double epsilon() const override { return config_.epsilon; }
  const NoiseMechanismConfig& config() const { return config_; }

  std::string ObfuscateWord(std::string_view word, RandomStream& rng) const override;
  // Every in-vocabulary token is perturbed, POS tags are ignored.
  bool Perturbs(const TaggedToken& token) const override { return token.in_vocab; }

 private:
  const EmbeddingStore& store_;
  NoiseMechanismConfig config_;
  std::optional<MahalanobisShaper> shaper_;
};

ObfuscationResult BaselineObfuscateQuery(const TaggedQuery& query,
                                         const NoiseMechanismConfig& config,
                                         const EmbeddingStore& store,
                                         RandomStream& rng);

}  // namespace qobf

#endif  // QOBF_BASELINES_HPP_
