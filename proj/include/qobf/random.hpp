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

#ifndef QOBF_RANDOM_HPP_
#define QOBF_RANDOM_HPP_

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <string_view>

namespace qobf {

// Philox4x32 with 10 rounds (Salmon et al., SC'11). Pure function of
// (counter, key); used as the block function of RandomStream.
std::array<uint32_t, 4> Philox4x32(std::array<uint32_t, 4> counter,
                                   std::array<uint32_t, 2> key);

// 64-bit FNV-1a, used to turn string identifiers into stream coordinates.
uint64_t HashName(std::string_view name);

// Combines stream coordinates into a single 64-bit stream id.
uint64_t MixStreamId(uint64_t base, uint64_t coordinate);

// Seedable counter-based random stream. The key is the seed, the upper half
// of the counter is the stream id and the lower half counts blocks, so every
// (seed, stream) pair addresses an independent, reproducible sequence.
//
// Satisfies UniformRandomBitGenerator so std distributions can draw from it.
class RandomStream {
 public:
  using result_type = uint64_t;

  RandomStream(uint64_t seed, uint64_t stream_id);

  // Stream for a named path, e.g. ForPath(seed, {HashName(qid), replicate}).
  static RandomStream ForPath(uint64_t seed,
                              std::initializer_list<uint64_t> path);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  // Uniform double in [0, 1) with 53 random bits.
  double Uniform();

  uint64_t seed() const { return seed_; }
  uint64_t stream_id() const { return stream_id_; }

 private:
  void Refill();

  uint64_t seed_;
  uint64_t stream_id_;
  uint64_t block_ = 0;
  std::array<uint64_t, 2> buffer_{};
  int available_ = 0;
};

}  // namespace qobf

#endif  // QOBF_RANDOM_HPP_
