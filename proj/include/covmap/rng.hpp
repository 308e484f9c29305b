// SPDX-License-Identifier: Apache-2.0
#pragma once

// Seeded random streams. xoshiro256** seeded through splitmix64, with our own
// Box-Muller transform: std::normal_distribution is not specified bit-for-bit
// across standard libraries and reports must be byte-stable.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace covmap {

struct RngSeed {
  std::uint64_t value = 0;

  /// Substream for the k-th sample of a seeded loop.
  RngSeed substream(std::uint64_t index) const { return RngSeed{value + index}; }
};

class Xoshiro256 {
public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(RngSeed seed) {
    std::uint64_t x = seed.value;
    for (auto& s : state_) s = splitmix64(x);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in (0, 1].
  double uniform_open0() { return (double((*this)() >> 11) + 1.0) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (double((*this)() >> 11) * 0x1.0p-53);
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open0();
    const double u2 = uniform_open0();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace covmap
