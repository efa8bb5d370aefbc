#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "promptevo/types.hpp"

namespace promptevo {

// Pareto dominance under maximization: a >= b everywhere and > somewhere.
// Throws UsageError on a length mismatch.
[[nodiscard]] bool dominates(std::span<const double> a, std::span<const double> b);

// a >= b everywhere.
[[nodiscard]] bool weakly_dominates(std::span<const double> a, std::span<const double> b);

// Deb's constrained domination. Feasible (d <= bound) beats infeasible; two
// infeasibles compare by smaller deviation; two feasibles by dominates().
[[nodiscard]] bool constrained_dominates(std::span<const double> a, double a_deviation,
                                         std::span<const double> b, double b_deviation, double bound);
[[nodiscard]] bool constrained_dominates(const Candidate& a, const Candidate& b, double bound);

namespace detail {

// Unchecked versions for hot loops; lengths must match.
inline bool dominates_unchecked(std::span<const double> a, std::span<const double> b) noexcept {
  bool strictly = false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] < b[k]) return false;
    if (a[k] > b[k]) strictly = true;
  }
  return strictly;
}

inline bool constrained_dominates_unchecked(std::span<const double> a, double da,
                                            std::span<const double> b, double db,
                                            double bound) noexcept {
  const bool fa = da <= bound;
  const bool fb = db <= bound;
  if (fa != fb) return fa;
  if (!fa) return da < db;
  return dominates_unchecked(a, b);
}

} // namespace detail

} // namespace promptevo
