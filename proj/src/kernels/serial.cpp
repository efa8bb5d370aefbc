#include <algorithm>

#include "promptevo/dominance.hpp"
#include "promptevo/kernels.hpp"
#include "promptevo/rng.hpp"

namespace promptevo::kernels {

void mc_sample_point(std::uint64_t seed, std::uint64_t j, std::span<const double> lo,
                     std::span<const double> hi, std::span<double> out) {
  SeedStream rng(mix64(mix64(seed) + j));
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = lo[k] + rng.next_uniform() * (hi[k] - lo[k]);
  }
}

namespace detail {

bool is_hit(std::span<const double> x, std::span<const double> points, std::size_t q) {
  const std::size_t n = q == 0 ? 0 : points.size() / q;
  for (std::size_t i = 0; i < n; ++i) {
    const double* p = points.data() + i * q;
    bool covers = true;
    for (std::size_t k = 0; k < q; ++k) {
      if (p[k] < x[k]) {
        covers = false;
        break;
      }
    }
    if (covers) return true;
  }
  return false;
}

} // namespace detail

namespace serial {

DominationMatrix constrained_domination_matrix(const PopulationView& pop, double bound) {
  const std::size_t n = pop.size();
  DominationMatrix out(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) {
        out[i * n + j] = promptevo::detail::constrained_dominates_unchecked(
            pop.row(i), pop.deviations[i], pop.row(j), pop.deviations[j], bound);
      }
    }
  }
  return out;
}

std::uint64_t mc_hit_count(const HitCountRequest& req) {
  std::vector<double> x(req.num_objectives);
  std::uint64_t hits = 0;
  for (std::uint64_t j = 0; j < req.samples; ++j) {
    mc_sample_point(req.seed, j, req.lo, req.hi, x);
    hits += detail::is_hit(x, req.points, req.num_objectives) ? 1 : 0;
  }
  return hits;
}

void for_each_index(std::size_t n, const std::function<void(std::size_t)>& body) {
  for (std::size_t i = 0; i < n; ++i) body(i);
}

} // namespace serial
} // namespace promptevo::kernels
