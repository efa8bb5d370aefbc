#include "promptevo/dominance.hpp"

#include "promptevo/errors.hpp"

namespace promptevo {

namespace {
void check_lengths(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw UsageError("objective vectors differ in length (" + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  }
}
} // namespace

bool dominates(std::span<const double> a, std::span<const double> b) {
  check_lengths(a, b);
  return detail::dominates_unchecked(a, b);
}

bool weakly_dominates(std::span<const double> a, std::span<const double> b) {
  check_lengths(a, b);
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] < b[k]) return false;
  }
  return true;
}

bool constrained_dominates(std::span<const double> a, double a_deviation, std::span<const double> b,
                           double b_deviation, double bound) {
  check_lengths(a, b);
  return detail::constrained_dominates_unchecked(a, a_deviation, b, b_deviation, bound);
}

bool constrained_dominates(const Candidate& a, const Candidate& b, double bound) {
  return constrained_dominates(a.objectives(), a.deviation(), b.objectives(), b.deviation(), bound);
}

} // namespace promptevo
