#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "promptevo/types.hpp"

namespace promptevo {

struct Generated {
  Bytes payload;
  PhenotypeRef phenotype;
};

// A frozen conditional generative model used as the variation operator.
//
// generate() samples x ~ P(x | prompt); mutate() samples x ~ P(x | prompt,
// parent). Implementations must be deterministic in the seed, must return
// the parent payload unchanged for strength 0, and must tolerate concurrent
// calls (or serialize internally).
class Generator {
public:
  virtual ~Generator() = default;

  virtual Generated generate(const std::string& prompt, std::uint64_t seed) = 0;
  virtual Generated mutate(const std::string& prompt, const Genotype& parent, std::uint64_t seed,
                           double strength) = 0;
};

// Multi-label scorer plus the embedding similarity used for the deviation
// constraint. evaluate() returns one probability per label; embed_similarity()
// returns the cosine of the normalized phenotype and prompt embeddings.
class Evaluator {
public:
  virtual ~Evaluator() = default;

  virtual std::vector<double> evaluate(const PhenotypeRef& phenotype,
                                       const std::vector<std::string>& labels) = 0;
  virtual double embed_similarity(const PhenotypeRef& phenotype, const std::string& prompt) = 0;
};

// A worker implements both contracts (the builtin testbed, a bridged process).
class Worker : public Generator, public Evaluator {};

} // namespace promptevo
