#pragma once

#include <cstdint>
#include <random>

namespace mist {

/// Portable random stream.
///
/// Bits come from std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The distribution transforms are implemented here rather than
/// taken from <random>, because the standard leaves those
/// implementation-defined:
///   uniform()   = (bits >> 11) * 2^-53, in [0, 1)
///   below(n)    = rejection sampling on the top bits, unbiased
///   gaussian()  = Box-Muller, both outputs used, cached pair
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    // [2^64 mod n, 2^64) holds a whole number of copies of [0, n).
    const std::uint64_t reject_below = (0 - n) % n;
    std::uint64_t x = engine_();
    while (x < reject_below) x = engine_();
    return x % n;
  }

  double gaussian();

  /// Independent child stream derived from this one's next output.
  Rng split() { return Rng(engine_() ^ 0x9E3779B97F4A7C15ULL); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace mist
