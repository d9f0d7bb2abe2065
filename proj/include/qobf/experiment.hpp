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

#ifndef QOBF_EXPERIMENT_HPP_
#define QOBF_EXPERIMENT_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "qobf/embeddings.hpp"
#include "qobf/retrieval.hpp"

namespace qobf {

// Everything an experiment command needs. Loaded from an INI-style file
// (`[section]` headers, `key = value` lines, lists comma-separated) and
// overridable key by key with Set("section.key", value).
//
//   [inputs]     embeddings, embedding_dim, lexicon, stopwords, corpus,
//                queries, qrels, target_tags
//   [mechanism]  name (wbb|cmp|mahalanobis|none, list), epsilon (list),
//                k (list), n (list), measure (list), lambda
//   [retrieval]  scorers (bm25|tfidf|embedding, list), depth, cutoff, k1, b
//   [run]        batch, seed, out, workers, oracle
struct ExperimentConfig {
  std::filesystem::path embeddings;
  std::optional<std::size_t> embedding_dim;
  std::filesystem::path lexicon;
  std::filesystem::path stopwords;
  std::filesystem::path corpus;
  std::filesystem::path queries;
  std::filesystem::path qrels;
  std::set<std::string> target_tags;

  std::vector<std::string> mechanisms{"wbb"};
  std::vector<double> epsilons{1.0, 5.0, 10.0, 12.5, 15.0, 17.5, 20.0, 50.0};
  std::vector<std::size_t> ks{4};
  std::vector<std::size_t> ns{50};
  std::vector<SimilarityMeasure> measures{SimilarityMeasure::kAngle};
  double lambda = 0.5;

  std::vector<std::string> scorers{"bm25", "tfidf", "embedding"};
  std::size_t depth = 100;
  std::size_t cutoff = 10;
  Bm25Params bm25;

  std::size_t batch = 20;
  uint64_t seed = 42;
  std::filesystem::path out = "out";
  std::size_t workers = 1;
  // Use the brute-force oracles for box construction and scoring.
  bool oracle = false;

  // Relative paths in the file resolve against the file's directory.
  static ExperimentConfig Load(const std::filesystem::path& path);

  // Throws kInvalidArgument for unknown keys or malformed values. Relative
  // paths resolve against `base` when it is non-empty.
  void Set(std::string_view key, std::string_view value,
           const std::filesystem::path& base = {});

  // `needs_retrieval` additionally requires corpus and qrels.
  void Validate(bool needs_retrieval) const;
};

// One point of the experiment grid. k, n and measure only apply to wbb.
struct Cell {
  std::string mechanism;
  double epsilon = 0.0;
  std::size_t k = 0;
  std::size_t n = 0;
  SimilarityMeasure measure = SimilarityMeasure::kAngle;

  bool IsWbb() const { return mechanism == "wbb"; }
  // e.g. "wbb:k=4,n=50,meas=angle" or "cmp".
  std::string Label() const;
  // e.g. "mech-wbb_eps-10_k-4_n-50_meas-angle".
  std::string DirectoryName() const;
};

// wbb cells span epsilon x k x n x measure, the noise baselines epsilon only
// and "none" a single cell.
std::vector<Cell> ExpandCells(const ExperimentConfig& config);

// Shortest round-trip spelling used in names and tables ("12.5", "1").
std::string FormatNumber(double value);

struct CommandOutput {
  std::vector<std::filesystem::path> files;
  std::size_t skipped_queries = 0;
};

// Every command writes complete files through a temporary name and a rename,
// and is reproducible byte for byte from (inputs, config, seed).
CommandOutput RunObfuscate(const ExperimentConfig& config);
CommandOutput RunPrivacyEval(const ExperimentConfig& config);
CommandOutput RunRetrievalEval(const ExperimentConfig& config);
CommandOutput RunSweep(const ExperimentConfig& config);

// Dispatches on "obfuscate", "privacy-eval", "retrieval-eval" or "sweep".
CommandOutput RunCommand(std::string_view command, const ExperimentConfig& config);

void WriteFileAtomically(const std::filesystem::path& path, std::string_view content);

}  // namespace qobf

#endif  // QOBF_EXPERIMENT_HPP_
