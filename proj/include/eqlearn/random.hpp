#pragma once

// Named random sub-streams derived from one master seed.

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace eqlearn {

using Rng = std::mt19937_64;

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

/// Seed for the stream `name` under `master`.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view name) noexcept {
  return detail::splitmix64(master ^ detail::splitmix64(detail::fnv1a(name)));
}

/// Seed for a stream keyed by a path of names, e.g. {"scenario-3", "cs-r2"}.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::string_view> path) noexcept {
  std::uint64_t s = master;
  for (auto part : path) s = derive_seed(s, part);
  return s;
}

inline Rng make_rng(std::uint64_t master, std::string_view name) { return Rng(derive_seed(master, name)); }

}  // namespace eqlearn
