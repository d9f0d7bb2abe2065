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

#ifndef QOBF_EMBEDDINGS_HPP_
#define QOBF_EMBEDDINGS_HPP_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace qobf {

// How closeness between two word vectors is scored when building boxes.
enum class SimilarityMeasure {
  kAngle,     // cosine similarity
  kDistance,  // Euclidean distance, as similarity 1 / (1 + d)
  kProduct,   // cosine * 1 / (1 + d)
};

std::string_view MeasureName(SimilarityMeasure measure);

// Accepts "angle" / "distance" / "product" and the single letters A / D / P.
SimilarityMeasure ParseMeasure(std::string_view text);

// Throws kInvalidArgument on a dimension mismatch or a zero-norm input.
double CosineSimilarity(std::span<const double> a, std::span<const double> b);

// Throws kInvalidArgument on a dimension mismatch.
double EuclideanDistance(std::span<const double> a, std::span<const double> b);

// Maps a distance to a bounded similarity in (0, 1].
inline double EuclideanSimilarity(double distance) {
  return 1.0 / (1.0 + distance);
}

struct ScoredWord {
  std::string word;
  double score = 0.0;

  friend bool operator==(const ScoredWord&, const ScoredWord&) = default;
};

// Immutable vocabulary -> vector table. Safe to share between threads.
class EmbeddingStore {
 public:
  // Reads `<token> <f1> ... <fD>` records. Tokens are lowercased; a token
  // whose lowercase form was already seen under a different spelling is
  // dropped, an exact repeat is a kDuplicate error.
  static EmbeddingStore Load(const std::filesystem::path& path,
                             std::optional<std::size_t> expected_dim = {});
  static EmbeddingStore Parse(std::istream& in,
                              std::optional<std::size_t> expected_dim = {},
                              std::string_view source = "<stream>");
  static EmbeddingStore FromRows(std::vector<std::string> words,
                                 const std::vector<std::vector<double>>& rows);

  std::size_t size() const { return words_.size(); }
  std::size_t dimension() const { return dimension_; }

  const std::vector<std::string>& vocabulary() const { return words_; }
  const std::string& word(std::size_t index) const { return words_[index]; }

  std::optional<std::size_t> IndexOf(std::string_view word) const;
  bool Contains(std::string_view word) const { return IndexOf(word).has_value(); }

  std::span<const double> Vector(std::size_t index) const {
    return {values_.data() + index * dimension_, dimension_};
  }
  // Throws kOutOfVocabulary.
  std::span<const double> Vector(std::string_view word) const;
  double Norm(std::size_t index) const { return norms_[index]; }

  // Unified similarity score, larger means closer. Cosine against a
  // zero-norm row is taken as 0.
  double Similarity(std::size_t a, std::size_t b,
                    SimilarityMeasure measure) const;

  // The `count` vocabulary words closest to `probe`, most similar first,
  // ties broken by the word string. The probe itself takes part.
  std::vector<ScoredWord> RankBySimilarity(std::string_view probe,
                                           SimilarityMeasure measure,
                                           std::size_t count) const;

  struct Ranked {
    std::size_t index;
    double score;
  };
  std::vector<Ranked> RankIndices(std::size_t probe, SimilarityMeasure measure,
                                  std::size_t count) const;

  // Vocabulary index with the smallest Euclidean distance to `point`.
  std::size_t Nearest(std::span<const double> point) const;

  // Mean of the vectors of in-vocabulary tokens; nullopt if there are none.
  std::optional<std::vector<double>> MeanVector(
      std::span<const std::string> tokens) const;

 private:
  EmbeddingStore() = default;
  void Append(std::string word, std::span<const double> row);

  std::size_t dimension_ = 0;
  std::vector<std::string> words_;
  std::vector<double> values_;
  std::vector<double> norms_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace qobf

#endif  // QOBF_EMBEDDINGS_HPP_
