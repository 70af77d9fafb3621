#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace sccl {

using Rng = std::mt19937_64;

/// 64-bit FNV-1a; stable across platforms, used to name random streams.
constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

/// Independent generator for a named stream under a run seed. Parameter
/// initialization draws from per-name streams so that the value of a tensor
/// does not depend on which other tensors a model variant allocates.
inline Rng derive_rng(std::uint64_t seed, std::string_view stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(fnv1a(stream)),
                    static_cast<std::uint32_t>(fnv1a(stream) >> 32)};
  return Rng(seq);
}

inline std::vector<double> uniform_values(std::size_t n, double lo, double hi, Rng& rng) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> out(n);
  for (auto& v : out) v = dist(rng);
  return out;
}

}  // namespace sccl
