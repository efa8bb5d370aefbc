#include "promptevo/objectives.hpp"

#include <cmath>
#include <string>

#include "promptevo/errors.hpp"

namespace promptevo {

double deviation(double cosine, double tau) {
  if (!(cosine >= -1.0 && cosine <= 1.0)) {
    throw ProtocolError("similarity " + std::to_string(cosine) + " outside [-1, 1]");
  }
  if (!(tau > 0.0)) {
    throw UsageError("tau must be > 0");
  }
  return tau * (1.0 - cosine);
}

bool is_feasible(double deviation, double bound) noexcept { return deviation <= bound; }

bool is_feasible(const Candidate& candidate, double bound) {
  return is_feasible(candidate.deviation(), bound);
}

Candidate evaluate_candidate(const Candidate& candidate, Evaluator& evaluator, const RunConfig& config) {
  if (candidate.evaluated()) {
    throw UsageError("candidate " + candidate.id + " already evaluated");
  }
  auto values = evaluator.evaluate(candidate.phenotype, config.labels);
  if (values.size() != config.num_objectives()) {
    throw ProtocolError("objective count mismatch for " + candidate.id + ": expected " +
                        std::to_string(config.num_objectives()) + ", got " +
                        std::to_string(values.size()));
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0 && values[i] <= 1.0)) {
      throw ProtocolError("objective for label " + std::to_string(i) + " (" + config.labels[i] +
                          ") out of range [0,1]: " + std::to_string(values[i]));
    }
  }
  const double cosine = evaluator.embed_similarity(candidate.phenotype, config.prompt);
  Candidate out = candidate;
  out.evaluation = Evaluation{ObjectiveVector(std::move(values)), deviation(cosine, config.tau)};
  return out;
}

} // namespace promptevo
