#include <omp.h>

#include "promptevo/dominance.hpp"
#include "promptevo/kernels.hpp"

namespace promptevo::kernels {

namespace detail {
bool is_hit(std::span<const double> x, std::span<const double> points, std::size_t q);
}

namespace openmp {

DominationMatrix constrained_domination_matrix(const PopulationView& pop, double bound) {
  const auto n = static_cast<std::ptrdiff_t>(pop.size());
  DominationMatrix out(pop.size() * pop.size(), 0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    for (std::size_t j = 0; j < pop.size(); ++j) {
      if (ui != j) {
        out[ui * pop.size() + j] = promptevo::detail::constrained_dominates_unchecked(
            pop.row(ui), pop.deviations[ui], pop.row(j), pop.deviations[j], bound);
      }
    }
  }
  return out;
}

std::uint64_t mc_hit_count(const HitCountRequest& req) {
  const auto samples = static_cast<std::int64_t>(req.samples);
  std::uint64_t hits = 0;
#pragma omp parallel reduction(+ : hits)
  {
    std::vector<double> x(req.num_objectives);
#pragma omp for schedule(static)
    for (std::int64_t j = 0; j < samples; ++j) {
      mc_sample_point(req.seed, static_cast<std::uint64_t>(j), req.lo, req.hi, x);
      hits += detail::is_hit(x, req.points, req.num_objectives) ? 1 : 0;
    }
  }
  return hits;
}

void for_each_index(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    body(static_cast<std::size_t>(i));
  }
}

} // namespace openmp
} // namespace promptevo::kernels
