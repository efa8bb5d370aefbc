#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

// Data-parallel inner loops. Every kernel has a serial reference in
// kernels::serial and an OpenMP version in kernels::openmp that must produce
// bit-identical results; the dispatching entry points pick one.
namespace promptevo::kernels {

enum class Backend { automatic, serial, openmp };

[[nodiscard]] bool openmp_available() noexcept;

// Row-major n x q objective matrix with one deviation per row.
struct PopulationView {
  std::span<const double> objectives;
  std::span<const double> deviations;
  std::size_t num_objectives = 0;

  [[nodiscard]] std::size_t size() const noexcept { return deviations.size(); }
  [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept {
    return objectives.subspan(i * num_objectives, num_objectives);
  }
};

// out[i * n + j] = 1 iff row i constrained-dominates row j.
using DominationMatrix = std::vector<std::uint8_t>;

// Number of the `samples` uniform points in the box [lo, hi] weakly
// dominated by at least one row of `points` (row-major, q columns). Sample j
// is drawn from its own counter-based stream, so the count does not depend on
// how samples are split across threads.
struct HitCountRequest {
  std::span<const double> points;
  std::size_t num_objectives = 0;
  std::span<const double> lo;
  std::span<const double> hi;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

namespace serial {
DominationMatrix constrained_domination_matrix(const PopulationView& pop, double bound);
std::uint64_t mc_hit_count(const HitCountRequest& req);
void for_each_index(std::size_t n, const std::function<void(std::size_t)>& body);
} // namespace serial

namespace openmp {
DominationMatrix constrained_domination_matrix(const PopulationView& pop, double bound);
std::uint64_t mc_hit_count(const HitCountRequest& req);
void for_each_index(std::size_t n, int threads, const std::function<void(std::size_t)>& body);
} // namespace openmp

DominationMatrix constrained_domination_matrix(const PopulationView& pop, double bound,
                                               Backend backend = Backend::automatic);
std::uint64_t mc_hit_count(const HitCountRequest& req, Backend backend = Backend::automatic);

// Runs body(i) for i in [0, n) on up to `jobs` threads. Exceptions are
// captured per index and the one with the smallest index is rethrown after
// all work finishes.
void for_each_index(std::size_t n, int jobs, const std::function<void(std::size_t)>& body);

// Sample point j of a hit-count request, written into `out` (size q).
void mc_sample_point(std::uint64_t seed, std::uint64_t j, std::span<const double> lo,
                     std::span<const double> hi, std::span<double> out);

} // namespace promptevo::kernels
