#pragma once

#include <cstdint>
#include <string_view>

namespace anisorec {

/// Counter-based generator: every draw is a pure function of (seed, stream, counter),
/// so any element of a random sequence can be regenerated independently of the others.
///
/// The mixing function is the SplitMix64 finalizer applied to a Weyl-sequence position.
/// Changing the mixing in any way must bump kIdentity; experiment outputs record it.
class CounterRng {
public:
  static constexpr std::string_view kIdentity = "anisorec-ctr-splitmix64/v1";

  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

  /// Raw 64-bit output at an absolute counter position.
  [[nodiscard]] constexpr std::uint64_t at(std::uint64_t counter) const noexcept {
    return mix(key_ + (counter + 1) * 0x9e3779b97f4a7c15ULL);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  [[nodiscard]] constexpr double uniform_at(std::uint64_t counter) const noexcept {
    return static_cast<double>(at(counter) >> 11) * 0x1.0p-53;
  }

  /// Sequential interface over the same counter space.
  constexpr std::uint64_t next() noexcept { return at(counter_++); }
  constexpr double next_uniform() noexcept { return uniform_at(counter_++); }

  /// Uniform integer in [0, bound) by rejection (unbiased).
  constexpr std::uint64_t next_below(std::uint64_t bound) noexcept {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    for (;;) {
      const std::uint64_t x = next();
      if (x < limit) return x % bound;
    }
  }

  [[nodiscard]] constexpr std::uint64_t position() const noexcept { return counter_; }

private:
  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Named streams so that independent consumers of one seed never share draws.
namespace streams {
inline constexpr std::uint64_t kSamples = 1;
inline constexpr std::uint64_t kPhases = 2;
inline constexpr std::uint64_t kSupport = 3;
inline constexpr std::uint64_t kNoise = 4;
inline constexpr std::uint64_t kSolverInit = 5;
} // namespace streams

} // namespace anisorec
