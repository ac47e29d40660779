#pragma once

#include <cstdint>
#include <random>

namespace gcbb {

// Seeded PRNG whose output is identical on every platform: the engine is
// fully specified by the standard and the double conversion is done here
// rather than by a library distribution.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// Mixes a base seed with stream coordinates (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t z = base ^ (a * 0x9E3779B97F4A7C15ULL) ^ (b * 0xD1B54A32D192ED03ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace gcbb
