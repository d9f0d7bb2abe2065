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

// Shared helpers for the test binaries.

#ifndef QOBF_TESTS_TEST_SUPPORT_HPP_
#define QOBF_TESTS_TEST_SUPPORT_HPP_

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qobf/embeddings.hpp"

namespace qobf::testing {

inline std::filesystem::path FixtureDir() { return QOBF_FIXTURE_DIR; }

inline std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path ScratchDir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("qobf_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Word names w0000, w0001, ...
inline std::string WordName(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "w%04zu", i);
  return buf;
}

// Isotropic Gaussian vocabulary, fully determined by `seed`.
inline EmbeddingStore GaussianStore(std::size_t words, std::size_t dim,
                                    uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < words; ++i) {
    names.push_back(WordName(i));
    std::vector<double> row(dim);
    for (auto& x : row) x = normal(gen);
    rows.push_back(std::move(row));
  }
  return EmbeddingStore::FromRows(std::move(names), rows);
}

// Upper-tail p-value of Pearson's chi-square statistic.
inline double ChiSquarePValue(const std::vector<std::size_t>& observed,
                              const std::vector<double>& probabilities) {
  double total = 0.0;
  for (auto c : observed) total += static_cast<double>(c);
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double expected = total * probabilities[i];
    const double diff = static_cast<double>(observed[i]) - expected;
    stat += diff * diff / expected;
  }
  boost::math::chi_squared dist(static_cast<double>(observed.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace qobf::testing

#endif  // QOBF_TESTS_TEST_SUPPORT_HPP_
