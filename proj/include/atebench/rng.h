/*
 * Copyright 2026 The atebench Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Counter-based random numbers.
//
// Every random quantity in the engine is a pure function of
// (stream key, counter). A stream key is derived from a user seed plus any
// number of integer labels (sample size, replicate, attempt, ...), and the
// counter is the row or draw index. Nothing depends on call order or thread
// schedule, which is what makes studies reproducible at any worker count.
//
// The block function is Philox4x32-10 (Salmon et al., SC'11).

#ifndef ATEBENCH_RNG_H_
#define ATEBENCH_RNG_H_

#include <array>
#include <cstdint>
#include <initializer_list>

namespace atebench {

// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t Mix64(std::uint64_t x);

// Folds a seed and labels into one 64-bit stream key. Order matters.
std::uint64_t DeriveKey(std::uint64_t seed,
                        std::initializer_list<std::uint64_t> labels);

// Philox4x32-10 keyed by a 64-bit key. Stateless; cheap to copy.
class Philox {
 public:
  using Block = std::array<std::uint32_t, 4>;

  explicit Philox(std::uint64_t key) : key_(key) {}

  // 128 random bits for the 128-bit counter (hi, lo).
  Block operator()(std::uint64_t counter_hi, std::uint64_t counter_lo) const;

  // Two 64-bit words from one block.
  std::array<std::uint64_t, 2> Words(std::uint64_t counter_hi,
                                     std::uint64_t counter_lo) const;

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
};

// Uniform double in [0, 1) from the top 53 bits.
inline double ToUnitInterval(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Integer in [0, bound) by 128-bit multiply. Bias is at most bound / 2^64.
__extension__ using Uint128 = unsigned __int128;

inline std::uint64_t ToBoundedIndex(std::uint64_t bits, std::uint64_t bound) {
  return static_cast<std::uint64_t>((static_cast<Uint128>(bits) * bound) >> 64);
}

}  // namespace atebench

#endif  // ATEBENCH_RNG_H_
