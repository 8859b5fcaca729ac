#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace edgeopt {

// All randomness flows through mt19937_64 plus the converters below.
// std::uniform_*_distribution is not pinned across standard libraries, so
// draws are converted by hand to keep runs bit-identical everywhere.
using Rng = std::mt19937_64;

// Uniform double in [0, 1), 53-bit resolution.
inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_in(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_unit(rng);
}

// Uniform index in [0, n), rejection-sampled to stay unbiased.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  if (n <= 1) return 0;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<std::size_t>(x % n);
}

template <typename T>
void shuffle_in_place(Rng& rng, std::vector<T>& v) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[uniform_index(rng, i)]);
  }
}

}  // namespace edgeopt
