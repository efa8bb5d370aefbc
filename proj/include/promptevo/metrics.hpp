#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "promptevo/config.hpp"
#include "promptevo/kernels.hpp"
#include "promptevo/types.hpp"

namespace promptevo {

using Point = std::vector<double>;

struct HypervolumeResult {
  enum class Method { exact, monte_carlo };

  double value = 0.0;
  Method method = Method::exact;
  std::optional<double> mc_stderr; // set iff method == monte_carlo
  std::size_t discarded = 0;       // points that did not weakly dominate the reference
};

// Indices (ascending) of the non-dominated points under maximization.
// Duplicates of a retained point are all retained.
[[nodiscard]] std::vector<std::size_t> pareto_front(std::span<const Point> points);

// Exact dominated volume between `reference` and the points, for Q <= 3
// (Q = 2 by a sorted sweep, Q = 3 by sweeping 2-D slices). Points that do not
// weakly dominate the reference are dropped and counted. Q > 3 throws
// UsageError; use hypervolume_mc.
[[nodiscard]] HypervolumeResult hypervolume_exact(std::span<const Point> points, std::span<const double> reference);

// Uniform sampling in the box [reference, componentwise max of the points].
// value = box volume * hit fraction; stderr = box volume * binomial stderr.
// Needs samples >= 1000. Deterministic in `seed`, independent of backend.
[[nodiscard]] HypervolumeResult hypervolume_mc(std::span<const Point> points, std::span<const double> reference,
                                               std::uint64_t samples, std::uint64_t seed,
                                               kernels::Backend backend = kernels::Backend::automatic);

// Exact for Q <= 3, Monte Carlo otherwise.
[[nodiscard]] HypervolumeResult hypervolume(std::span<const Point> points, std::span<const double> reference,
                                            std::uint64_t mc_samples, std::uint64_t mc_seed);

// One metrics.csv row.
struct MetricsRow {
  std::size_t generation = 0;
  std::size_t evaluations = 0;
  std::size_t feasible_count = 0;
  std::size_t archive_size = 0;
  double hypervolume = 0.0;
  std::vector<double> best; // per objective, over the archive; 0 when empty

  friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

// Builds a row from an archive. Throws ConfigError if some archive point does
// not weakly dominate config.hv_reference.
[[nodiscard]] MetricsRow make_metrics_row(std::size_t generation, std::size_t evaluations,
                                          std::size_t feasible_count, std::span<const Candidate> archive,
                                          const RunConfig& config);

[[nodiscard]] std::vector<std::string> metrics_csv_header(std::size_t num_objectives);
// Fixed column order; doubles printed with 17 significant digits.
[[nodiscard]] std::string format_metrics_row(const MetricsRow& row);
[[nodiscard]] MetricsRow parse_metrics_row(const std::string& line, std::size_t num_objectives);

[[nodiscard]] std::string format_double(double v);

} // namespace promptevo
