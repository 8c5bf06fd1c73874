// scsot/rng.h

// Copyright 2026  The scsot authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef SCSOT_RNG_H_
#define SCSOT_RNG_H_

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "scsot/common.h"

namespace scsot {

inline uint64_t SplitMix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Deterministic RNG with fixed distribution algorithms.  std::mt19937_64 is
// fully specified by the standard; the std::*_distribution adapters are not,
// so this class implements its own and must be used for anything that feeds
// reproducible artifacts (corpora, parameter init, shuffles).
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed), engine_(SplitMix64(seed)) {}

  uint64_t NextU64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of mantissa.
  double Uniform() {
    return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
  }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Inclusive range.  Modulo bias is negligible for the small ranges used
  // here and keeps the mapping platform-independent.
  int64_t UniformInt(int64_t lo, int64_t hi) {
    SCSOT_CHECK(lo <= hi, "UniformInt: empty range");
    uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    return lo + static_cast<int64_t>(NextU64() % span);
  }

  // Box-Muller without caching: consumes two uniforms per draw.
  double Normal() {
    double u1 = 1.0 - Uniform();  // (0, 1]
    double u2 = Uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925 * u2);
  }

  // Independent substream; forking with distinct ids from the same parent
  // yields decorrelated, reproducible streams.
  Rng Fork(uint64_t stream) const {
    return Rng(SplitMix64(seed_ ^ (0x632BE59BD9B4E019ULL + 0x9E3779B97F4A7C15ULL * stream)));
  }

  // Fisher-Yates with fixed index mapping.
  template <typename T>
  void Shuffle(std::vector<T>* v) {
    for (size_t i = v->size(); i > 1; --i) {
      size_t j = static_cast<size_t>(UniformInt(0, static_cast<int64_t>(i) - 1));
      std::swap((*v)[i - 1], (*v)[j]);
    }
  }

 private:
  uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace scsot

#endif  // SCSOT_RNG_H_
