#pragma once

#include <cstddef>
#include <vector>

#include "promptevo/config.hpp"
#include "promptevo/contracts.hpp"
#include "promptevo/metrics.hpp"
#include "promptevo/types.hpp"

namespace promptevo {

struct EvolutionState {
  std::size_t generation = 0;
  std::vector<Candidate> population; // mu survivors, sorted by id
  std::vector<Candidate> archive;    // feasible non-dominated ever seen, sorted by id
  std::vector<Candidate> evaluated;  // candidates evaluated in this generation, by birth index
  std::size_t evaluations_used = 0;  // mu + generation * lambda
};

// Receives one (state, metrics row) pair per generation, generation 0 first.
class RunSink {
public:
  virtual ~RunSink() = default;
  virtual void on_generation(const EvolutionState& state, const MetricsRow& row) = 0;
};

class NullSink final : public RunSink {
public:
  void on_generation(const EvolutionState&, const MetricsRow&) override {}
};

struct EvolveOptions {
  // Offspring generated and evaluated concurrently per generation. Results
  // are merged by birth index, so the run does not depend on this value.
  int jobs = 1;
};

// Feasible members of the population.
[[nodiscard]] std::size_t count_feasible(std::span<const Candidate> candidates, double bound);

// Metrics row for an engine state: feasible count over the population,
// hypervolume over the archive.
[[nodiscard]] MetricsRow generation_stats(const EvolutionState& state, const RunConfig& config);

// Constrained NSGA-II with the generator as the only variation operator.
//
// Generation 0 draws mu candidates from P(x | prompt). Each later generation
// picks lambda parents by binary tournament on (rank, crowding), asks the
// generator for one child per parent, evaluates the children and keeps the
// best mu of parents + children. Worker errors propagate after the sink has
// seen every completed generation.
EvolutionState evolve(const RunConfig& config, Generator& generator, Evaluator& evaluator, RunSink& sink,
                      const EvolveOptions& options = {});

} // namespace promptevo
