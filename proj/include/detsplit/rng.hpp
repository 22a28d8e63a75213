// Copyright 2026 The detsplit Authors
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

#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace detsplit {

/// splitmix64 finalizer. Bijective on 64-bit words, used as the mixing core
/// of every random draw in the project.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// FNV-1a over the raw bytes of a string.
constexpr std::uint64_t hash_str(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Purpose tags keep unrelated draw streams disjoint even when they share a
/// seed and an entity name.
enum class Draw : std::uint64_t {
  kTpEvent = 1,
  kTpJitter,
  kTpConfidence,
  kFpCount,
  kFpBox,
  kFpConfidence,
  kFaceCount,
  kFaceSize,
  kFacePlacement,
  kScoreNoise,
  kBaselineSubset,
};

/// Deterministic counter-based random stream. Every draw is a pure function
/// of (seed, name, purpose, index, counter), so any value can be reproduced
/// without replaying earlier draws and results never depend on the order in
/// which entities are visited.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::string_view name, Draw purpose,
               std::uint64_t index = 0) noexcept
      : key_(mix64(seed ^ mix64(hash_str(name) ^
                                mix64(static_cast<std::uint64_t>(purpose) ^
                                      mix64(index))))) {}

  std::uint64_t next_u64() noexcept { return mix64(key_ ^ mix64(counter_++)); }

  /// Uniform double in [0, 1).
  double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform();
  }

  /// Uniform double in [-1, 1).
  double symmetric() noexcept { return 2.0 * uniform() - 1.0; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Poisson quantile by CDF inversion from a single uniform draw. For a fixed
/// u the result is non-decreasing in `mean`, which keeps coupled fast/slow
/// streams ordered: the smaller rate yields a prefix of the larger rate's
/// events.
inline int poisson_from_uniform(double mean, double u) {
  if (mean <= 0.0) return 0;
  double pmf = std::exp(-mean);
  double cdf = pmf;
  int k = 0;
  while (u >= cdf && k < 100000) {
    ++k;
    pmf *= mean / k;
    cdf += pmf;
  }
  return k;
}

/// Standard normal deviate via Box-Muller from two uniform draws.
inline double normal_from_uniforms(double u1, double u2) {
  constexpr double kTwoPi = 6.283185307179586;
  const double r = std::sqrt(-2.0 * std::log1p(-u1));  // u1 in [0,1)
  return r * std::cos(kTwoPi * u2);
}

}  // namespace detsplit
