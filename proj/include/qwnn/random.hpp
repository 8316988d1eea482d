#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace qwnn {

using Rng = std::mt19937_64;

// SplitMix64 finalizer, used to decorrelate derived seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Seed for a named sub-stream ("window", "measurement", "backprop-init", ...)
/// of a single master seed. Streams with different names are independent.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view stream) noexcept {
  return mix64(master ^ mix64(fnv1a(stream)));
}

inline Rng make_rng(std::uint64_t master, std::string_view stream) {
  return Rng{derive_seed(master, stream)};
}

}  // namespace qwnn
