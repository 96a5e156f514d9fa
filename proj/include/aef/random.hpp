#pragma once

// Random streams. Every stochastic routine takes an explicit engine; engines
// for independent work items are derived from one base seed, a purpose tag and
// a list of indices so results never depend on scheduling.

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace aef {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// seed = mix(mix(mix(base, tag), i0), i1) ...
inline constexpr std::uint64_t derive_seed(std::uint64_t base, std::string_view tag,
                                           std::initializer_list<std::uint64_t> indices = {}) noexcept {
  std::uint64_t h = splitmix64(base ^ splitmix64(fnv1a(tag)));
  for (std::uint64_t i : indices) h = splitmix64(h ^ splitmix64(i + 0x632be59bd9b4e019ULL));
  return h;
}

inline Rng derive_rng(std::uint64_t base, std::string_view tag, std::initializer_list<std::uint64_t> indices = {}) {
  return Rng(derive_seed(base, tag, indices));
}

}  // namespace aef
