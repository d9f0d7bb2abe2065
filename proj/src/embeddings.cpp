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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <unordered_set>

#include "qobf/error.hpp"
#include "strings.hpp"

namespace qobf {
namespace {

void CheckSameDimension(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    Fail(ErrorCode::kInvalidArgument,
         "dimension mismatch: " + std::to_string(a.size()) + " vs " +
             std::to_string(b.size()));
  }
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double SquaredDistance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return sum;
}

}  // namespace

std::string_view MeasureName(SimilarityMeasure measure) {
  switch (measure) {
    case SimilarityMeasure::kAngle:
      return "angle";
    case SimilarityMeasure::kDistance:
      return "distance";
    case SimilarityMeasure::kProduct:
      return "product";
  }
  return "unknown";
}

SimilarityMeasure ParseMeasure(std::string_view text) {
  const std::string lower = internal::ToLower(internal::Trim(text));
  if (lower == "angle" || lower == "a" || lower == "cosine") {
    return SimilarityMeasure::kAngle;
  }
  if (lower == "distance" || lower == "d" || lower == "euclidean") {
    return SimilarityMeasure::kDistance;
  }
  if (lower == "product" || lower == "p") return SimilarityMeasure::kProduct;
  Fail(ErrorCode::kInvalidArgument,
       "unknown similarity measure '" + std::string(text) + "'");
}

double CosineSimilarity(std::span<const double> a, std::span<const double> b) {
  CheckSameDimension(a, b);
  const double na = std::sqrt(Dot(a, a));
  const double nb = std::sqrt(Dot(b, b));
  if (na == 0.0 || nb == 0.0) {
    Fail(ErrorCode::kInvalidArgument, "cosine similarity of a zero vector");
  }
  return std::clamp(Dot(a, b) / (na * nb), -1.0, 1.0);
}

double EuclideanDistance(std::span<const double> a, std::span<const double> b) {
  CheckSameDimension(a, b);
  return std::sqrt(SquaredDistance(a, b));
}

EmbeddingStore EmbeddingStore::Load(const std::filesystem::path& path,
                                    std::optional<std::size_t> expected_dim) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open embeddings '" + path.string() + "'");
  return Parse(in, expected_dim, path.string());
}

EmbeddingStore EmbeddingStore::Parse(std::istream& in,
                                     std::optional<std::size_t> expected_dim,
                                     std::string_view source) {
  if (expected_dim && *expected_dim == 0) {
    Fail(ErrorCode::kInvalidArgument, "expected dimension must be positive");
  }
  EmbeddingStore store;
  std::unordered_set<std::string> raw_tokens;
  std::vector<double> row;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto fields = internal::SplitWhitespace(line);
    if (fields.empty()) continue;
    const auto where = std::string(source) + ":" + std::to_string(line_number);
    const std::size_t arity = fields.size() - 1;
    if (arity == 0) Fail(ErrorCode::kParse, where + ": token without a vector");
    if (store.dimension_ == 0) {
      store.dimension_ = expected_dim.value_or(arity);
    }
    if (arity != store.dimension_) {
      Fail(ErrorCode::kParse, where + ": expected " +
                                  std::to_string(store.dimension_) +
                                  " components, found " + std::to_string(arity));
    }
    row.clear();
    for (std::size_t i = 1; i < fields.size(); ++i) {
      const auto value = internal::ParseDouble(fields[i]);
      if (!value || !std::isfinite(*value)) {
        Fail(ErrorCode::kParse, where + ": non-numeric component '" +
                                    std::string(fields[i]) + "'");
      }
      row.push_back(*value);
    }
    std::string raw(fields[0]);
    if (!raw_tokens.insert(raw).second) {
      Fail(ErrorCode::kDuplicate, where + ": duplicate word '" + raw + "'");
    }
    std::string word = internal::ToLower(raw);
    if (store.index_.contains(word)) continue;  // first spelling wins
    store.Append(std::move(word), row);
  }
  if (store.words_.empty()) {
    Fail(ErrorCode::kParse, std::string(source) + ": no embeddings found");
  }
  return store;
}

EmbeddingStore EmbeddingStore::FromRows(
    std::vector<std::string> words,
    const std::vector<std::vector<double>>& rows) {
  if (words.empty() || words.size() != rows.size()) {
    Fail(ErrorCode::kInvalidArgument,
         "need one non-empty row per word and at least one word");
  }
  EmbeddingStore store;
  store.dimension_ = rows.front().size();
  if (store.dimension_ == 0) {
    Fail(ErrorCode::kInvalidArgument, "vectors must have positive dimension");
  }
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (rows[i].size() != store.dimension_) {
      Fail(ErrorCode::kInvalidArgument,
           "row for '" + words[i] + "' has the wrong dimension");
    }
    std::string word = internal::ToLower(words[i]);
    if (store.index_.contains(word)) {
      Fail(ErrorCode::kDuplicate, "duplicate word '" + word + "'");
    }
    store.Append(std::move(word), rows[i]);
  }
  return store;
}

void EmbeddingStore::Append(std::string word, std::span<const double> row) {
  index_.emplace(word, words_.size());
  words_.push_back(std::move(word));
  values_.insert(values_.end(), row.begin(), row.end());
  norms_.push_back(std::sqrt(Dot(row, row)));
}

std::optional<std::size_t> EmbeddingStore::IndexOf(std::string_view word) const {
  const auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::span<const double> EmbeddingStore::Vector(std::string_view word) const {
  const auto index = IndexOf(word);
  if (!index) {
    Fail(ErrorCode::kOutOfVocabulary,
         "word '" + std::string(word) + "' is not in the vocabulary");
  }
  return Vector(*index);
}

double EmbeddingStore::Similarity(std::size_t a, std::size_t b,
                                  SimilarityMeasure measure) const {
  const auto va = Vector(a);
  const auto vb = Vector(b);
  const double denom = norms_[a] * norms_[b];
  const double cosine =
      denom == 0.0 ? 0.0 : std::clamp(Dot(va, vb) / denom, -1.0, 1.0);
  switch (measure) {
    case SimilarityMeasure::kAngle:
      return cosine;
    case SimilarityMeasure::kDistance:
      return EuclideanSimilarity(std::sqrt(SquaredDistance(va, vb)));
    case SimilarityMeasure::kProduct:
      return cosine * EuclideanSimilarity(std::sqrt(SquaredDistance(va, vb)));
  }
  return 0.0;
}

std::vector<EmbeddingStore::Ranked> EmbeddingStore::RankIndices(
    std::size_t probe, SimilarityMeasure measure, std::size_t count) const {
  if (probe >= size()) Fail(ErrorCode::kInvalidArgument, "probe index out of range");
  if (count > size()) {
    Fail(ErrorCode::kInvalidArgument,
         "cannot rank " + std::to_string(count) + " words from a vocabulary of " +
             std::to_string(size()));
  }
  // Distance is ordered on the raw distance so that no two distinct
  // distances collapse onto the same 1 / (1 + d) value.
  struct Keyed {
    double key;
    double score;
    std::size_t index;
  };
  std::vector<Keyed> keyed(size());
  for (std::size_t i = 0; i < size(); ++i) {
    const double score = Similarity(probe, i, measure);
    double key = score;
    if (measure == SimilarityMeasure::kDistance) {
      key = -std::sqrt(SquaredDistance(Vector(probe), Vector(i)));
    }
    keyed[i] = {key, score, i};
  }
  const auto before = [this](const Keyed& a, const Keyed& b) {
    if (a.key != b.key) return a.key > b.key;
    return words_[a.index] < words_[b.index];
  };
  std::partial_sort(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(count),
                    keyed.end(), before);
  std::vector<Ranked> ranked;
  ranked.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    ranked.push_back({keyed[i].index, keyed[i].score});
  }
  return ranked;
}

std::vector<ScoredWord> EmbeddingStore::RankBySimilarity(
    std::string_view probe, SimilarityMeasure measure, std::size_t count) const {
  const auto index = IndexOf(probe);
  if (!index) {
    Fail(ErrorCode::kOutOfVocabulary,
         "probe '" + std::string(probe) + "' is not in the vocabulary");
  }
  std::vector<ScoredWord> out;
  for (const auto& r : RankIndices(*index, measure, count)) {
    out.push_back({words_[r.index], r.score});
  }
  return out;
}

std::size_t EmbeddingStore::Nearest(std::span<const double> point) const {
  if (point.size() != dimension_) {
    Fail(ErrorCode::kInvalidArgument, "point has the wrong dimension");
  }
  std::size_t best = 0;
  double best_distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < size(); ++i) {
    const double d = SquaredDistance(point, Vector(i));
    if (d < best_distance || (d == best_distance && words_[i] < words_[best])) {
      best = i;
      best_distance = d;
    }
  }
  return best;
}

std::optional<std::vector<double>> EmbeddingStore::MeanVector(
    std::span<const std::string> tokens) const {
  std::vector<double> mean(dimension_, 0.0);
  std::size_t found = 0;
  for (const auto& token : tokens) {
    const auto index = IndexOf(token);
    if (!index) continue;
    const auto v = Vector(*index);
    for (std::size_t i = 0; i < dimension_; ++i) mean[i] += v[i];
    ++found;
  }
  if (found == 0) return std::nullopt;
  for (double& x : mean) x /= static_cast<double>(found);
  return mean;
}

}  // namespace qobf
