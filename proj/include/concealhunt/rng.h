/*
 * Copyright 2026 The concealhunt Authors.
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

#ifndef CONCEALHUNT_RNG_H_
#define CONCEALHUNT_RNG_H_

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace concealhunt {

// Seeded generator used for every random draw in a run. Bounded draws and
// shuffles are implemented here (not with <random> distributions) so that a
// seed replays bit-identically across standard library implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  // Independent substream keyed by (seed, label).
  static Rng Derive(uint64_t seed, std::string_view label);

  uint64_t Next() { return engine_(); }
  // Uniform in [0, bound). bound must be > 0.
  uint64_t Below(uint64_t bound);
  // Uniform in [0, 1).
  double Unit();
  void Fill(std::span<uint8_t> out);
  std::vector<uint8_t> Bytes(size_t n);

  template <typename T>
  void Shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(Below(i));
      using std::swap;
      swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer; also used to mix labels into seeds.
uint64_t Mix64(uint64_t x);
uint64_t HashLabel(std::string_view label);

}  // namespace concealhunt

#endif  // CONCEALHUNT_RNG_H_
