#pragma once

#include <cassert>
#include <cstdint>
#include <random>

namespace grga {

// Seeded random source used throughout the library.  Wraps std::mt19937_64
// and exposes the two primitive draws everything else is built from.  The
// standard <random> distributions are implementation-defined, so rolling the
// mapping by hand keeps identical seeds reproducible across toolchains.
class rng_engine {
 public:
  explicit rng_engine(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0, 1) with 53-bit resolution.
  double next_unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  std::size_t next_index(std::size_t n) {
    assert(n > 0);
    auto k = static_cast<std::size_t>(next_unit() * static_cast<double>(n));
    return k < n ? k : n - 1;
  }

  std::uint64_t next_raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace grga
