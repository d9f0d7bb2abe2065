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

#include "qobf/baselines.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "qobf/error.hpp"

namespace qobf {

void NoiseMechanismConfig::Validate() const {
  if (!std::isfinite(epsilon) || epsilon <= 0.0) {
    Fail(ErrorCode::kInvalidArgument, "noise mechanisms need epsilon > 0");
  }
  if (variant == NoiseVariant::kMahalanobis && !(lambda >= 0.0 && lambda <= 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "lambda must lie in [0, 1]");
  }
}

std::vector<double> SampleUnitDirection(std::size_t dim, RandomStream& rng) {
  std::vector<double> v(dim);
  double norm = 0.0;
  do {
    std::normal_distribution<double> normal(0.0, 1.0);
    norm = 0.0;
    for (double& x : v) {
      x = normal(rng);
      norm += x * x;
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

double SampleNoiseMagnitude(std::size_t dim, double epsilon, RandomStream& rng) {
  std::gamma_distribution<double> gamma(static_cast<double>(dim), 1.0 / epsilon);
  return gamma(rng);
}

std::vector<double> SampleCmpNoise(std::size_t dim, double epsilon,
                                   RandomStream& rng) {
  auto noise = SampleUnitDirection(dim, rng);
  const double magnitude = SampleNoiseMagnitude(dim, epsilon, rng);
  for (double& x : noise) x *= magnitude;
  return noise;
}

MahalanobisShaper::MahalanobisShaper(const EmbeddingStore& store, double lambda)
    : dim_(store.dimension()), lambda_(lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "lambda must lie in [0, 1]");
  }
  const auto rows = static_cast<Eigen::Index>(store.size());
  const auto cols = static_cast<Eigen::Index>(dim_);
  Eigen::MatrixXd data(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto v = store.Vector(static_cast<std::size_t>(i));
    for (Eigen::Index j = 0; j < cols; ++j) data(i, j) = v[static_cast<std::size_t>(j)];
  }
  const Eigen::RowVectorXd mean = data.colwise().mean();
  const Eigen::MatrixXd centered = data.rowwise() - mean;
  Eigen::MatrixXd covariance =
      (centered.transpose() * centered) / static_cast<double>(rows);
  const double mean_variance = covariance.trace() / static_cast<double>(cols);
  if (mean_variance > 0.0) {
    covariance /= mean_variance;
  } else {
    covariance.setIdentity(cols, cols);
  }
  const Eigen::MatrixXd shaped =
      lambda * covariance +
      (1.0 - lambda) * Eigen::MatrixXd::Identity(cols, cols);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(shaped);
  if (solver.info() != Eigen::Success) {
    Fail(ErrorCode::kInternal, "eigendecomposition of the shaping matrix failed");
  }
  const Eigen::VectorXd eigenvalues = solver.eigenvalues();
  if (eigenvalues.minCoeff() <= 1e-12 * std::max(1.0, eigenvalues.maxCoeff())) {
    Fail(ErrorCode::kInvalidArgument,
         "Mahalanobis shaping matrix is singular; use lambda < 1");
  }
  const Eigen::MatrixXd root = solver.operatorSqrt();
  matrix_.resize(dim_ * dim_);
  for (Eigen::Index i = 0; i < cols; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      matrix_[static_cast<std::size_t>(i * cols + j)] = root(i, j);
    }
  }
}

std::vector<double> MahalanobisShaper::ShapeDirection(
    std::span<const double> direction) const {
  if (direction.size() != dim_) {
    Fail(ErrorCode::kInvalidArgument, "direction has the wrong dimension");
  }
  std::vector<double> out(dim_, 0.0);
  double norm = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) sum += matrix_[i * dim_ + j] * direction[j];
    out[i] = sum;
    norm += sum * sum;
  }
  norm = std::sqrt(norm);
  for (double& x : out) x /= norm;
  return out;
}

std::vector<double> SampleMahalanobisNoise(const MahalanobisShaper& shaper,
                                           double epsilon, RandomStream& rng) {
  const auto direction = SampleUnitDirection(shaper.dimension(), rng);
  auto noise = shaper.ShapeDirection(direction);
  const double magnitude = SampleNoiseMagnitude(shaper.dimension(), epsilon, rng);
  for (double& x : noise) x *= magnitude;
  return noise;
}

std::string NearestToPerturbed(std::string_view word,
                               std::span<const double> noise,
                               const EmbeddingStore& store) {
  const auto base = store.Vector(word);
  std::vector<double> point(base.begin(), base.end());
  if (noise.size() != point.size()) {
    Fail(ErrorCode::kInvalidArgument, "noise has the wrong dimension");
  }
  for (std::size_t i = 0; i < point.size(); ++i) point[i] += noise[i];
  return store.word(store.Nearest(point));
}

std::string CmpObfuscateWord(std::string_view word, double epsilon,
                             const EmbeddingStore& store, RandomStream& rng) {
  store.Vector(word);  // OOV check before drawing
  NoiseMechanismConfig{epsilon, NoiseVariant::kCmp}.Validate();
  const auto noise = SampleCmpNoise(store.dimension(), epsilon, rng);
  return NearestToPerturbed(word, noise, store);
}

std::string MahalanobisObfuscateWord(std::string_view word, double epsilon,
                                     const MahalanobisShaper& shaper,
                                     const EmbeddingStore& store,
                                     RandomStream& rng) {
  store.Vector(word);
  NoiseMechanismConfig{epsilon, NoiseVariant::kMahalanobis, shaper.lambda()}.Validate();
  const auto noise = SampleMahalanobisNoise(shaper, epsilon, rng);
  return NearestToPerturbed(word, noise, store);
}

NoiseMechanism::NoiseMechanism(const EmbeddingStore& store,
                               NoiseMechanismConfig config)
    : store_(store), config_(config) {
  config_.Validate();
  if (config_.variant == NoiseVariant::kMahalanobis) {
    shaper_.emplace(store_, config_.lambda);
  }
}

std::string NoiseMechanism::name() const {
  return config_.variant == NoiseVariant::kCmp ? "cmp" : "mahalanobis";
}

std::string NoiseMechanism::ObfuscateWord(std::string_view word,
                                          RandomStream& rng) const {
  if (shaper_) {
    return MahalanobisObfuscateWord(word, config_.epsilon, *shaper_, store_, rng);
  }
  return CmpObfuscateWord(word, config_.epsilon, store_, rng);
}

ObfuscationResult BaselineObfuscateQuery(const TaggedQuery& query,
                                         const NoiseMechanismConfig& config,
                                         const EmbeddingStore& store,
                                         RandomStream& rng) {
  return NoiseMechanism(store, config).ObfuscateQuery(query, rng);
}

}  // namespace qobf
