#pragma once

#include <cstdint>
#include <vector>

#include "promptevo/config.hpp"
#include "promptevo/contracts.hpp"
#include "promptevo/types.hpp"

namespace promptevo {

// Generation 0: mu parentless candidates drawn from P(x | prompt), seeded by
// derive_seed(run_seed, 0, i). `jobs` > 1 issues generator calls concurrently;
// results are placed by birth index.
[[nodiscard]] std::vector<Candidate> spawn_initial(const RunConfig& config, Generator& generator,
                                                   int jobs = 1);

// One unevaluated child drawn from P(x | prompt, parent) at the configured
// mutation strength.
[[nodiscard]] Candidate spawn_offspring(const RunConfig& config, Generator& generator,
                                        const Candidate& parent, std::uint32_t generation,
                                        std::uint32_t birth_index);

// Parentless candidate (generation 0 numbering) from an arbitrary prompt; used
// by spawn_initial and the brute-force baseline.
[[nodiscard]] Candidate spawn_fresh(const RunConfig& config, Generator& generator,
                                    const std::string& prompt, std::uint32_t birth_index);

} // namespace promptevo
