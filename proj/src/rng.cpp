#include "promptevo/rng.hpp"

#include <cmath>
#include <numbers>

#include "promptevo/errors.hpp"

namespace promptevo {

std::uint64_t derive_seed(std::uint64_t run_seed, std::uint64_t generation,
                          std::uint64_t birth_index) {
  if (generation >> 32 != 0 || birth_index >> 32 != 0) {
    throw UsageError("derive_seed: generation and birth index must be < 2^32");
  }
  return mix64(mix64(run_seed) + ((generation << 32) | birth_index));
}

namespace {
constexpr double two_pow_minus_53 = 1.0 / 9007199254740992.0;
}

double SeedStream::next_uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * two_pow_minus_53;
}

double SeedStream::next_uniform_open_low() noexcept {
  return static_cast<double>((next_u64() >> 11) + 1) * two_pow_minus_53;
}

std::uint64_t SeedStream::next_below(std::uint64_t n) noexcept {
  const auto wide = static_cast<unsigned __int128>(next_u64()) * n;
  return static_cast<std::uint64_t>(wide >> 64);
}

double SeedStream::next_normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = next_uniform_open_low();
  const double u2 = next_uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

} // namespace promptevo
