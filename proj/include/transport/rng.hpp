#pragma once

#include <cstdint>
#include <random>

namespace transport {

// SplitMix64 step; used to spread seeds before feeding them to mt19937_64.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic seed for substream (a, b) of a master seed.  Replicate r of a
// run uses substream (r, 0); nested draws can use the second index.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t a,
                                    std::uint64_t b = 0) {
  std::uint64_t s = splitmix64(seed ^ 0x6a09e667f3bcc909ULL);
  s = splitmix64(s ^ splitmix64(a + 0x243f6a8885a308d3ULL));
  s = splitmix64(s ^ splitmix64(b + 0x13198a2e03707344ULL));
  return s;
}

// Independent engine for one substream.  Streams for distinct (seed, a, b)
// never share state, so replicates can run in any order or in parallel.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t a,
                                   std::uint64_t b = 0) {
  return std::mt19937_64(substream_seed(seed, a, b));
}

}  // namespace transport
