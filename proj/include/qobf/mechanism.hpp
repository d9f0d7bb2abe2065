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

#ifndef QOBF_MECHANISM_HPP_
#define QOBF_MECHANISM_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qobf/preprocess.hpp"
#include "qobf/random.hpp"

namespace qobf {

enum class Provenance {
  kKeptNonTarget,
  kKeptOov,
  kReplaced,
};

// One-letter code used in output files: N, O or R.
char ProvenanceCode(Provenance provenance);

struct ObfuscationResult {
  TaggedQuery original;
  std::vector<std::string> tokens;
  std::vector<Provenance> provenance;
  uint64_t seed = 0;
  uint64_t stream_id = 0;

  std::string Text() const;
  // e.g. "RNRR": one provenance code per token.
  std::string ProvenanceCodes() const;
};

// A word-level obfuscation mechanism. Implementations are immutable apart
// from internal caches and may be shared between threads.
class Mechanism {
 public:
  virtual ~Mechanism() = default;

  // Short identifier used in file names and reports ("wbb", "cmp", ...).
  virtual std::string name() const = 0;
  virtual double epsilon() const = 0;

  // One draw for a single in-vocabulary word.
  virtual std::string ObfuscateWord(std::string_view word,
                                    RandomStream& rng) const = 0;

  // Whether the mechanism perturbs `token` at all.
  virtual bool Perturbs(const TaggedToken& token) const = 0;

  // Replaces every perturbed token with ObfuscateWord, in token order, and
  // copies the rest.
  ObfuscationResult ObfuscateQuery(const TaggedQuery& query,
                                   RandomStream& rng) const;
};

// Leaves every token untouched.
class IdentityMechanism final : public Mechanism {
 public:
  std::string name() const override { return "none"; }
  double epsilon() const override { return 0.0; }
  std::string ObfuscateWord(std::string_view word, RandomStream&) const override {
    return std::string(word);
  }
  bool Perturbs(const TaggedToken&) const override { return false; }
};

// `count` independent obfuscations; replicate i draws from the stream
// RandomStream::ForPath(seed, {HashName(query_id), i}).
std::vector<ObfuscationResult> ObfuscateBatch(const Mechanism& mechanism,
                                              const TaggedQuery& query,
                                              std::size_t count, uint64_t seed,
                                              std::string_view query_id);

RandomStream ReplicateStream(uint64_t seed, std::string_view query_id,
                             std::size_t replicate);

}  // namespace qobf

#endif  // QOBF_MECHANISM_HPP_
