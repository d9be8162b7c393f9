#pragma once

#include <cstdint>
#include <random>

namespace mtsim {

// splitmix64 finalizer; derives independent stream seeds from one user seed.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic stream. mt19937_64's output sequence is fixed by the
// standard, and the conversions below avoid the implementation-defined
// <random> distributions, so runs replay bit-identically across toolchains.
class Random {
 public:
  explicit Random(std::uint64_t seed = 0) : gen_(seed) {}

  void reseed(std::uint64_t seed) { gen_.seed(seed); }

  std::uint64_t next() { return gen_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Consumes exactly one draw. p <= 0 never fires, p >= 1 always fires.
  bool chance(double p) { return uniform() < p; }

  // Uniform integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace mtsim
