#pragma once

#include "promptevo/config.hpp"
#include "promptevo/contracts.hpp"
#include "promptevo/types.hpp"

namespace promptevo {

// d = tau * (1 - cosine), in [0, 2 tau]. A cosine outside [-1, 1] is a
// protocol violation by whoever produced it.
[[nodiscard]] double deviation(double cosine, double tau);

// Inclusive: d <= bound.
[[nodiscard]] bool is_feasible(double deviation, double bound) noexcept;
[[nodiscard]] bool is_feasible(const Candidate& candidate, double bound);

// Scores an unevaluated candidate: objectives from evaluate(), deviation from
// embed_similarity(). Throws UsageError if already evaluated and
// ProtocolError on a wrong count or out-of-range value.
[[nodiscard]] Candidate evaluate_candidate(const Candidate& candidate, Evaluator& evaluator,
                                           const RunConfig& config);

} // namespace promptevo
