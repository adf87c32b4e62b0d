#pragma once

// Random numbers used across the library.
//
// The generator is std::mt19937_64, whose output sequence is fixed by the C++
// standard. Distributions from <random> are implementation-defined, so the
// conversions below are spelled out and must stay bit-exact:
//
//   index(n)  = next() % n
//   unit()    = (next() >> 11) * 2^-53          in [0, 1)
//
// Changing either formula changes every seeded output (chaos game orbits,
// sampled pairs) and requires a major version bump.

#include <cstdint>
#include <random>

namespace hutchfrac {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  std::size_t index(std::size_t n) { return static_cast<std::size_t>(next() % n); }

  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hutchfrac
