#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace stresslens::detail {

/// Uniform draw from [0, bound) without modulo bias. Unlike
/// std::uniform_int_distribution the sequence is fixed across standard
/// libraries.
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t r;
  do r = rng();
  while (r >= limit);
  return r % bound;
}

template <typename T>
void shuffle(std::span<T> items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(bounded(rng, i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace stresslens::detail
