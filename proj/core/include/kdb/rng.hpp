#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace kdb {

using Rng = std::mt19937_64;

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Named sub-stream seed: the result depends on the base seed and on every
// key in order, and nothing else.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> keys) noexcept
{
  std::uint64_t s = mix64(base);
  for (auto k : keys)
    s = mix64(s ^ mix64(k + 0x632be59bd9b4e019ULL));
  return s;
}

// Uniform double in [0,1) from the top 53 bits.
inline double uniform01(Rng& rng) noexcept
{
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace kdb
