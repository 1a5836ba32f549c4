// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>
#include <vector>

namespace prunelab {

// 64-bit FNV-1a over a byte string. Used for RNG stream derivation and as
// the checksum primitive of the on-disk formats.
constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t fnv1a64_bytes(const void* data, std::size_t n,
                                   std::uint64_t h = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

// Deterministic splitmix64 stream. Every random draw in the project flows
// through this class so results do not depend on standard-library
// distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  // Named substream: (seed, label, index) fully determines the stream.
  Rng(std::uint64_t seed, std::string_view label, std::uint64_t index = 0)
      : state_(mix(mix(seed ^ fnv1a64(label)) + index)) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  // Uniform in [0, 1).
  double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Inclusive bounds. Modulo bias is negligible for the ranges used here.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + std::int64_t(next_u64() % std::uint64_t(hi - lo + 1));
  }

  // Box-Muller, cosine branch only; two draws per value, no cached state.
  double gaussian() {
    double u1 = double((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = std::size_t(uniform_int(0, std::int64_t(i) - 1));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace prunelab
