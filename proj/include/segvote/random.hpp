// Copyright 2026 The segvote Authors
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


#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace segvote {

/// SplitMix64 (Steele, Lea & Flood; reference code by S. Vigna).
///
/// The generator is a Weyl sequence pushed through a 64-bit finalizer, so the
/// i-th output of a stream is computable directly with at(). Every randomized
/// operation in the toolkit draws from (key, index) pairs this way, which makes
/// results independent of how work is split across threads.
class SplitMix64 {
 public:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next() {
    state_ += kGamma;
    return finalize(state_);
  }

  /// Output number `index` (zero-based) of the stream seeded with `key`.
  static constexpr std::uint64_t at(std::uint64_t key, std::uint64_t index) {
    return finalize(key + (index + 1) * kGamma);
  }

  static constexpr std::uint64_t finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Combines a seed with a sub-stream tag into a new stream key.
constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t tag) {
  return SplitMix64::finalize(seed ^ SplitMix64::finalize(tag + SplitMix64::kGamma));
}

/// FNV-1a, used to turn names (entry ids, stream labels) into stream tags.
constexpr std::uint64_t hash_name(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Uniform double in [0, 1) with 53 random bits.
constexpr double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Uniform double in (0, 1].
constexpr double to_unit_open_low(std::uint64_t bits) {
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

/// Unbiased integer in [0, bound) (Lemire's multiply-and-reject), consuming
/// successive draws of the (key, index...) stream as needed.
inline std::uint64_t uniform_below(SplitMix64& rng, std::uint64_t bound) {
  std::uint64_t x = rng.next();
  __uint128_t m = static_cast<__uint128_t>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = rng.next();
      m = static_cast<__uint128_t>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

/// Standard normal draw number `index` of stream `key` (Box-Muller, cosine branch).
inline double standard_normal_at(std::uint64_t key, std::uint64_t index) {
  const double u1 = to_unit_open_low(SplitMix64::at(key, 2 * index));
  const double u2 = to_unit(SplitMix64::at(key, 2 * index + 1));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace segvote
