#include <exception>

#include "promptevo/kernels.hpp"

namespace promptevo::kernels {

namespace {
// Below these sizes thread start-up costs more than the work.
constexpr std::size_t parallel_matrix_min_rows = 256;
constexpr std::uint64_t parallel_mc_min_samples = 20000;

bool use_openmp(Backend backend, bool large) {
  switch (backend) {
  case Backend::serial:
    return false;
  case Backend::openmp:
    return openmp_available();
  case Backend::automatic:
    return openmp_available() && large;
  }
  return false;
}
} // namespace

bool openmp_available() noexcept {
#ifdef PROMPTEVO_HAVE_OPENMP
  return true;
#else
  return false;
#endif
}

DominationMatrix constrained_domination_matrix(const PopulationView& pop, double bound, Backend backend) {
#ifdef PROMPTEVO_HAVE_OPENMP
  if (use_openmp(backend, pop.size() >= parallel_matrix_min_rows)) {
    return openmp::constrained_domination_matrix(pop, bound);
  }
#else
  (void)backend;
#endif
  return serial::constrained_domination_matrix(pop, bound);
}

std::uint64_t mc_hit_count(const HitCountRequest& req, Backend backend) {
#ifdef PROMPTEVO_HAVE_OPENMP
  if (use_openmp(backend, req.samples >= parallel_mc_min_samples)) {
    return openmp::mc_hit_count(req);
  }
#else
  (void)backend;
#endif
  return serial::mc_hit_count(req);
}

void for_each_index(std::size_t n, int jobs, const std::function<void(std::size_t)>& body) {
  std::vector<std::exception_ptr> errors(n);
  auto guarded = [&](std::size_t i) {
    try {
      body(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
#ifdef PROMPTEVO_HAVE_OPENMP
  if (jobs > 1 && n > 1) {
    openmp::for_each_index(n, jobs, guarded);
  } else {
    serial::for_each_index(n, guarded);
  }
#else
  (void)jobs;
  serial::for_each_index(n, guarded);
#endif
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

} // namespace promptevo::kernels
