#pragma once

#include <cstdint>
#include <random>

namespace dmln {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Per-(task, iteration) solver seeds are derived from the run seed so that
// results do not depend on worker count or scheduling order.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t task,
                                 std::uint64_t iteration) {
  return splitmix64(splitmix64(base ^ (task * 0x9e3779b97f4a7c15ULL)) ^
                    iteration);
}

using Rng = std::mt19937_64;

}  // namespace dmln
