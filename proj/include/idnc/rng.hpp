#pragma once

#include <cstdint>

namespace idnc {

/// SplitMix64 (Steele, Lea, Flood 2014). Counter-based: the state advances by a
/// fixed odd constant, so the n-th output is a pure function of (seed, n).
/// Used everywhere instead of <random> distributions to keep runs byte-identical
/// across platforms and standard libraries.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 bits of precision.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  bool bernoulli(double p) { return next_double() < p; }

  /// Unbiased-enough for simulation purposes (n << 2^64).
  std::uint64_t next_below(std::uint64_t n) { return n ? next() % n : 0; }

 private:
  std::uint64_t state_;
};

/// Derives an independent stream seed from a master seed and up to three
/// identifiers (frame index, user, direction, ...). Mixes through SplitMix64
/// so nearby identifiers give unrelated streams.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  SplitMix64 m(master ^ (a * 0xD1342543DE82EF95ULL) ^
               (b * 0xAF251AF3B0F025B5ULL) ^ (c * 0x9E6C63D0876A9A99ULL));
  m.next();
  return m.next();
}

}  // namespace idnc
