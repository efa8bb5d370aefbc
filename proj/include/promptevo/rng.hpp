#pragma once

#include <cstdint>

namespace promptevo {

// SplitMix64 finalizer (Stafford variant 13). A bijection on 64-bit words.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Per-candidate seed. Pure and counter-based so the value depends only on
// where the candidate sits in the run, never on evaluation order.
//
//   derive_seed(s, g, i) = mix64(mix64(s) + (g << 32 | i))
//
// For fixed s the map (g, i) -> seed is injective on g, i < 2^32, and for
// fixed (g, i) it is injective in s, since mix64 is a bijection.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t run_seed, std::uint64_t generation,
                                        std::uint64_t birth_index);

// SplitMix64 stream. Bit-exact definition shared with external workers
// (see PROTOCOL.md): state += 0x9E3779B97F4A7C15; output mix64(state).
class SeedStream {
public:
  static constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;

  explicit constexpr SeedStream(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next_u64() noexcept {
    state_ += golden_gamma;
    return mix64(state_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double next_uniform() noexcept;
  // Uniform on (0, 1].
  double next_uniform_open_low() noexcept;
  // Uniform integer on [0, n) by 128-bit multiply-shift; n > 0.
  std::uint64_t next_below(std::uint64_t n) noexcept;
  // Standard normal by Box-Muller; values come in (cos, sin) pairs.
  double next_normal() noexcept;

private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

} // namespace promptevo
