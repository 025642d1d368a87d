#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace dfx {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Combine two words into a new seed. Not symmetric.
std::uint64_t combine_seeds(std::uint64_t a, std::uint64_t b) noexcept;

/// Seed for an independent stream identified by (master seed, purpose, index).
/// Streams for different purposes or indices never share state, so splitting
/// work across threads by index cannot change what each stream draws.
std::uint64_t derive_seed(std::uint64_t master, std::string_view purpose, std::uint64_t index = 0) noexcept;

/// mt19937_64 with distribution code written out by hand, because the
/// standard distributions are allowed to differ between library vendors.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Unbiased integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  bool coin() { return (next() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dfx
