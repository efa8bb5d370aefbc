#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "promptevo/kernels.hpp"
#include "promptevo/rng.hpp"
#include "promptevo/types.hpp"

namespace promptevo {

// Non-dominated sorting result over a population, by index.
struct FrontPartition {
  std::vector<std::vector<std::size_t>> fronts; // rank 0 first; indices ascending within a front
  std::vector<std::size_t> rank;                // per population index
  std::vector<double> crowding;                 // per population index; empty until assigned

  [[nodiscard]] std::size_t size() const noexcept { return rank.size(); }
};

// Deb's fast non-dominated sort under constrained domination. Crowding is
// left unfilled.
[[nodiscard]] FrontPartition fast_nondominated_sort(std::span<const Candidate> pop, double bound,
                                                    kernels::Backend backend = kernels::Backend::automatic);

// Crowding distance of each member of a mutually non-dominated front, in the
// order given. Boundary members per objective get +inf; interior members sum
// (next - prev) / (max - min); an objective with max == min contributes 0.
// Sorting ties are broken by candidate id.
[[nodiscard]] std::vector<double> crowding_distance(std::span<const Candidate> front);

// Fills partition.crowding for every front.
void assign_crowding(FrontPartition& partition, std::span<const Candidate> pop);

// k-way tournament with replacement. Winner: lower rank, then larger
// crowding, then smaller id. Returns a population index. Needs crowding.
[[nodiscard]] std::size_t tournament_select(std::span<const Candidate> pop, const FrontPartition& partition,
                                            SeedStream& rng, std::size_t k = 2);

// Elitist (mu + lambda) truncation: whole fronts first, then the split front
// by descending crowding (ties by id). Output is sorted by candidate id.
[[nodiscard]] std::vector<Candidate> environmental_selection(std::vector<Candidate> pool, std::size_t mu,
                                                             double bound);

} // namespace promptevo
