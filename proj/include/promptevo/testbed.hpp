#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "promptevo/contracts.hpp"
#include "promptevo/types.hpp"

namespace promptevo::testbed {

using Latent = std::vector<double>;

// Synthetic generator + evaluator whose Pareto set is known in closed form.
//
// Objective i is a Gaussian bump exp(-|z - c_i|^2 / (2 sigma^2)); the prompt
// embedding is the unit vector prompt_anchor and the "image embedding" is z
// itself, so similarity is cos(z, prompt_anchor).
struct TestbedSpec {
  std::size_t dim = 2;
  std::vector<Latent> centers;
  double sigma = 1.0;
  Latent prompt_anchor;
  double strength = 0.6;

  [[nodiscard]] std::size_t num_objectives() const noexcept { return centers.size(); }
  // Empty when valid.
  [[nodiscard]] std::vector<std::string> validate() const;

  friend bool operator==(const TestbedSpec&, const TestbedSpec&) = default;
};

// Q = 2: centers +-e1 (distance 2). Q >= 3: sqrt(2) e_i, pairwise distance 2.
// Q = 1: e1. dim defaults to max(2, Q). The anchor is the normalized centroid
// of the centers, or the first center's direction when the centroid is zero.
[[nodiscard]] TestbedSpec default_spec(std::size_t num_objectives, std::size_t dim = 0);

[[nodiscard]] Latent normalized(std::span<const double> v);
// Normalized centroid of the centers; direction of the first center when the
// centroid vanishes (the symmetric Q = 2 default).
[[nodiscard]] Latent default_anchor(const std::vector<Latent>& centers);

// Genotype payload: dim little-endian IEEE-754 doubles.
[[nodiscard]] Bytes encode_latent(std::span<const double> z);
[[nodiscard]] Latent decode_latent(std::span<const std::uint8_t> payload);

[[nodiscard]] Latent synth_generate(const TestbedSpec& spec, std::uint64_t seed);
// z' = sqrt(1 - s^2) z + s eps with s = spec.strength, eps drawn from the seed.
[[nodiscard]] Latent synth_mutate(const TestbedSpec& spec, std::span<const double> parent,
                                  std::uint64_t seed);
[[nodiscard]] std::vector<double> synth_classify(const TestbedSpec& spec, std::span<const double> z);
// cos(z, anchor) clamped to [-1, 1]; 0 for z == 0.
[[nodiscard]] double synth_similarity(const TestbedSpec& spec, std::span<const double> z);

// Evenly spaced latent points on the segment c_1 -> c_2 (Q = 2 only).
[[nodiscard]] std::vector<Latent> known_pareto_set(const TestbedSpec& spec, std::size_t resolution);
// Objective vectors of known_pareto_set.
[[nodiscard]] std::vector<std::vector<double>> known_pareto_front(const TestbedSpec& spec,
                                                                  std::size_t resolution);

// Phenotype ids are "tb:" + lowercase hex of the genotype payload, which keeps
// the testbed stateless.
[[nodiscard]] std::string phenotype_id_for(std::span<const std::uint8_t> payload);
[[nodiscard]] Latent latent_from_phenotype(const PhenotypeRef& phenotype, std::size_t dim);

// Both contracts over the testbed math. The prompt is ignored: the anchor
// already plays the prompt embedding. Pure, so safe for concurrent calls.
class TestbedWorker final : public Worker {
public:
  explicit TestbedWorker(TestbedSpec spec);

  [[nodiscard]] const TestbedSpec& spec() const noexcept { return spec_; }

  Generated generate(const std::string& prompt, std::uint64_t seed) override;
  Generated mutate(const std::string& prompt, const Genotype& parent, std::uint64_t seed,
                   double strength) override;
  std::vector<double> evaluate(const PhenotypeRef& phenotype,
                               const std::vector<std::string>& labels) override;
  double embed_similarity(const PhenotypeRef& phenotype, const std::string& prompt) override;

private:
  TestbedSpec spec_;
};

} // namespace promptevo::testbed
