// Copyright 2026 The chanvec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CHANVEC_UTIL_H_
#define CHANVEC_UTIL_H_

#include <cstdint>
#include <string_view>

namespace chanvec {

// SplitMix64 finalizer. Used to derive independent sub-seeds from one seed.
constexpr uint64_t Mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr uint64_t MixSeed(uint64_t seed, uint64_t salt) {
  return Mix64(seed ^ Mix64(salt));
}

// 64-bit FNV-1a. Stable across platforms, unlike std::hash.
constexpr uint64_t HashString(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Uniform double in [0, 1) from a 64-bit value.
constexpr double ToUnitInterval(uint64_t x) {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// Worker count for parallel sections: CHANVEC_THREADS when set and positive,
// otherwise the hardware concurrency (at least 1).
int WorkerCount();

}  // namespace chanvec

#endif  // CHANVEC_UTIL_H_
