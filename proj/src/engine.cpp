#include "promptevo/engine.hpp"

#include <algorithm>

#include "promptevo/archive.hpp"
#include "promptevo/kernels.hpp"
#include "promptevo/objectives.hpp"
#include "promptevo/rng.hpp"
#include "promptevo/selection.hpp"
#include "promptevo/variation.hpp"

namespace promptevo {

namespace {

constexpr std::uint64_t selection_domain = 0x7365'6c65'6374'696fULL;

std::uint64_t selection_seed(std::uint64_t run_seed, std::size_t generation) {
  return derive_seed(mix64(run_seed ^ selection_domain), generation, 0);
}

} // namespace

std::size_t count_feasible(std::span<const Candidate> candidates, double bound) {
  return static_cast<std::size_t>(
      std::count_if(candidates.begin(), candidates.end(), [&](const Candidate& c) { return is_feasible(c, bound); }));
}

MetricsRow generation_stats(const EvolutionState& state, const RunConfig& config) {
  return make_metrics_row(state.generation, state.evaluations_used, count_feasible(state.population, config.bound),
                          state.archive, config);
}

EvolutionState evolve(const RunConfig& config, Generator& generator, Evaluator& evaluator, RunSink& sink,
                      const EvolveOptions& options) {
  const int jobs = std::max(1, options.jobs);
  ParetoArchive archive(config.bound);
  EvolutionState state;

  auto initial = spawn_initial(config, generator, jobs);
  kernels::for_each_index(initial.size(), jobs, [&](std::size_t i) {
    initial[i] = evaluate_candidate(initial[i], evaluator, config);
  });
  for (const auto& c : initial) archive.insert(c);

  state.generation = 0;
  state.evaluations_used = initial.size();
  state.evaluated = initial;
  state.population = std::move(initial);
  std::sort(state.population.begin(), state.population.end(),
            [](const Candidate& a, const Candidate& b) { return a.id < b.id; });
  state.archive = archive.members();
  sink.on_generation(state, generation_stats(state, config));

  for (std::size_t g = 1; g <= config.max_generations; ++g) {
    auto partition = fast_nondominated_sort(state.population, config.bound);
    assign_crowding(partition, state.population);

    // Parents are drawn sequentially so the draw never depends on scheduling.
    SeedStream rng(selection_seed(config.run_seed, g));
    std::vector<std::size_t> parents(config.lambda);
    for (auto& p : parents) {
      p = tournament_select(state.population, partition, rng, config.tournament_size);
    }

    std::vector<Candidate> offspring(config.lambda);
    kernels::for_each_index(config.lambda, jobs, [&](std::size_t i) {
      auto child = spawn_offspring(config, generator, state.population[parents[i]], static_cast<std::uint32_t>(g),
                                   static_cast<std::uint32_t>(i));
      offspring[i] = evaluate_candidate(child, evaluator, config);
    });
    for (const auto& c : offspring) archive.insert(c);

    std::vector<Candidate> pool = std::move(state.population);
    pool.insert(pool.end(), offspring.begin(), offspring.end());
    state.population = environmental_selection(std::move(pool), config.mu, config.bound);
    state.generation = g;
    state.evaluations_used += offspring.size();
    state.evaluated = std::move(offspring);
    state.archive = archive.members();
    sink.on_generation(state, generation_stats(state, config));
  }
  return state;
}

} // namespace promptevo
