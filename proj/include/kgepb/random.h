// Copyright 2026 The kgepb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef KGEPB_RANDOM_H_
#define KGEPB_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace kgepb {

// SplitMix64 finalizer.
uint64_t Mix64(uint64_t x);

// Derives an independent stream seed from a base seed, a stream name and an
// index. Every random decision in the library takes its seed from here, so a
// single global seed fixes an entire experiment.
uint64_t DeriveSeed(uint64_t base, std::string_view stream, uint64_t index = 0);

// Per-user stream for work that is parallel across users.
inline uint64_t UserSeed(uint64_t base, uint64_t user) {
  return Mix64(base ^ user);
}

// mt19937_64 is fully specified by the standard; the distributions below are
// written out by hand because std::uniform_*_distribution output differs
// between standard library implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t Next() { return engine_(); }

  // Uniform integer in [0, bound). bound must be positive.
  uint64_t Uniform(uint64_t bound);

  // Uniform double in [0, 1) with 53 random bits.
  double UniformReal() {
    return static_cast<double>(Next() >> 11) * 0x1.0p-53;
  }

  double UniformReal(double lo, double hi) {
    return lo + (hi - lo) * UniformReal();
  }

 private:
  std::mt19937_64 engine_;
};

// Fisher-Yates, walking from the back.
template <typename T>
void Shuffle(std::span<T> values, Rng& rng) {
  for (size_t i = values.size(); i > 1; --i) {
    const size_t j = rng.Uniform(i);
    std::swap(values[i - 1], values[j]);
  }
}

// Draws `count` elements without replacement by a partial forward
// Fisher-Yates pass over a copy of `pool`: step i swaps position i with
// i + Uniform(n - i). The result is in draw order.
template <typename T>
std::vector<T> SampleWithoutReplacement(std::span<const T> pool, size_t count,
                                        Rng& rng) {
  std::vector<T> scratch(pool.begin(), pool.end());
  const size_t n = scratch.size();
  for (size_t i = 0; i < count; ++i) {
    const size_t j = i + rng.Uniform(n - i);
    std::swap(scratch[i], scratch[j]);
  }
  scratch.resize(count);
  return scratch;
}

}  // namespace kgepb

#endif  // KGEPB_RANDOM_H_
