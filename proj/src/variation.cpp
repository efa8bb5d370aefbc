#include "promptevo/variation.hpp"

#include <exception>

#include "promptevo/errors.hpp"
#include "promptevo/kernels.hpp"
#include "promptevo/rng.hpp"

namespace promptevo {

namespace {

// Rethrows the in-flight exception with `context` prepended, keeping its type
// so callers can still map it to an exit code.
[[noreturn]] void rethrow_with_context(const std::string& context) {
  try {
    throw;
  } catch (const ProtocolError& e) {
    throw ProtocolError(context + ": " + e.what());
  } catch (const WorkerError& e) {
    throw WorkerError(context + ": " + e.what());
  } catch (const UsageError& e) {
    throw UsageError(context + ": " + e.what());
  } catch (const std::exception& e) {
    throw WorkerError(context + ": " + e.what());
  }
}

} // namespace

Candidate spawn_fresh(const RunConfig& config, Generator& generator, const std::string& prompt,
                      std::uint32_t birth_index) {
  const auto seed = derive_seed(config.run_seed, 0, birth_index);
  Generated out;
  try {
    out = generator.generate(prompt, seed);
  } catch (...) {
    rethrow_with_context("generate failed for birth index " + std::to_string(birth_index));
  }
  Candidate c;
  c.id = make_candidate_id(0, birth_index);
  c.genotype = Genotype{std::move(out.payload), seed};
  c.phenotype = std::move(out.phenotype);
  c.generation_born = 0;
  return c;
}

std::vector<Candidate> spawn_initial(const RunConfig& config, Generator& generator, int jobs) {
  std::vector<Candidate> pop(config.mu);
  kernels::for_each_index(config.mu, jobs, [&](std::size_t i) {
    pop[i] = spawn_fresh(config, generator, config.prompt, static_cast<std::uint32_t>(i));
  });
  return pop;
}

Candidate spawn_offspring(const RunConfig& config, Generator& generator, const Candidate& parent,
                          std::uint32_t generation, std::uint32_t birth_index) {
  if (generation < 1) {
    throw UsageError("offspring must be born in generation >= 1");
  }
  if (!parent.evaluated()) {
    throw UsageError("parent " + parent.id + " is not evaluated");
  }
  const auto seed = derive_seed(config.run_seed, generation, birth_index);
  Generated out;
  try {
    out = generator.mutate(config.prompt, parent.genotype, seed, config.mutation_strength);
  } catch (...) {
    rethrow_with_context("mutate failed for generation " + std::to_string(generation) +
                         " birth index " + std::to_string(birth_index));
  }
  Candidate c;
  c.id = make_candidate_id(generation, birth_index);
  c.genotype = Genotype{std::move(out.payload), seed};
  c.phenotype = std::move(out.phenotype);
  c.generation_born = generation;
  c.parent_id = parent.id;
  return c;
}

} // namespace promptevo
