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

#include "qobf/mechanism.hpp"

#include "qobf/error.hpp"

namespace qobf {

char ProvenanceCode(Provenance provenance) {
  switch (provenance) {
    case Provenance::kKeptNonTarget:
      return 'N';
    case Provenance::kKeptOov:
      return 'O';
    case Provenance::kReplaced:
      return 'R';
  }
  return '?';
}

std::string ObfuscationResult::Text() const {
  std::string out;
  for (const auto& token : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += token;
  }
  return out;
}

std::string ObfuscationResult::ProvenanceCodes() const {
  std::string out;
  for (Provenance p : provenance) out.push_back(ProvenanceCode(p));
  return out;
}

ObfuscationResult Mechanism::ObfuscateQuery(const TaggedQuery& query,
                                            RandomStream& rng) const {
  ObfuscationResult result;
  result.original = query;
  result.seed = rng.seed();
  result.stream_id = rng.stream_id();
  result.tokens.reserve(query.tokens.size());
  result.provenance.reserve(query.tokens.size());
  for (const auto& token : query.tokens) {
    if (!token.in_vocab) {
      result.tokens.push_back(token.surface);
      result.provenance.push_back(Provenance::kKeptOov);
    } else if (!Perturbs(token)) {
      result.tokens.push_back(token.surface);
      result.provenance.push_back(Provenance::kKeptNonTarget);
    } else {
      result.tokens.push_back(ObfuscateWord(token.surface, rng));
      result.provenance.push_back(Provenance::kReplaced);
    }
  }
  return result;
}

RandomStream ReplicateStream(uint64_t seed, std::string_view query_id,
                             std::size_t replicate) {
  return RandomStream::ForPath(seed, {HashName(query_id), replicate});
}

std::vector<ObfuscationResult> ObfuscateBatch(const Mechanism& mechanism,
                                              const TaggedQuery& query,
                                              std::size_t count, uint64_t seed,
                                              std::string_view query_id) {
  if (count == 0) Fail(ErrorCode::kInvalidArgument, "batch count must be >= 1");
  std::vector<ObfuscationResult> results;
  results.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    RandomStream rng = ReplicateStream(seed, query_id, i);
    results.push_back(mechanism.ObfuscateQuery(query, rng));
  }
  return results;
}

}  // namespace qobf
