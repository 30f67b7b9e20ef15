#pragma once

#include <cstdint>
#include <random>

namespace consol {

/// Seeded 64-bit Mersenne Twister with a platform-independent mapping to
/// uniform doubles, so sampled point sets are identical across standard
/// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  /// Uniform on the open interval (0, 1).
  double open01() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  /// Uniform on the open interval (lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * open01(); }

 private:
  std::mt19937_64 engine_;
};

/// Independent streams derived from one user seed.
enum class RngStream : std::uint64_t {
  init = 1,
  interior = 2,
  boundary = 3,
  initial = 4,
  test = 5,
  test_interior = 6,
  test_boundary = 7,
  test_initial = 8,
  compare = 9,
};

inline Rng make_rng(std::uint64_t seed, RngStream stream) {
  return Rng(seed, static_cast<std::uint64_t>(stream));
}

}  // namespace consol
