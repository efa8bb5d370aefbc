#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace promptevo {

using Bytes = std::vector<std::uint8_t>;

// Generator-owned representation of an individual. The engine never looks
// inside the payload.
struct Genotype {
  Bytes payload;
  std::uint64_t seed = 0;

  friend bool operator==(const Genotype&, const Genotype&) = default;
};

// Handle to a generated artifact (image file, content hash, ...). Minted by
// the generator and only ever passed back to it or to the evaluator.
class PhenotypeRef {
public:
  using Dims = std::array<std::uint32_t, 3>; // height, width, channels

  PhenotypeRef() = default;
  explicit PhenotypeRef(std::string id, std::optional<Dims> dims = std::nullopt);

  [[nodiscard]] const std::string& id() const noexcept { return id_; }
  [[nodiscard]] const std::optional<Dims>& dims() const noexcept { return dims_; }

  friend bool operator==(const PhenotypeRef&, const PhenotypeRef&) = default;

private:
  std::string id_;
  std::optional<Dims> dims_;
};

// Q label probabilities, all in [0, 1], maximized.
class ObjectiveVector {
public:
  ObjectiveVector() = default;
  explicit ObjectiveVector(std::vector<double> values);

  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] const std::vector<double>& as_vector() const noexcept { return values_; }
  operator std::span<const double>() const noexcept { return values_; }

  friend bool operator==(const ObjectiveVector&, const ObjectiveVector&) = default;

private:
  std::vector<double> values_;
};

struct Evaluation {
  ObjectiveVector objectives;
  double deviation = 0.0;

  friend bool operator==(const Evaluation&, const Evaluation&) = default;
};

// One evolving individual. Ids are "g<generation>-<birth>" zero-padded so that
// lexicographic order equals (generation, birth) order; ties anywhere in the
// engine are broken by this order.
struct Candidate {
  std::string id;
  Genotype genotype;
  PhenotypeRef phenotype;
  std::uint32_t generation_born = 0;
  std::optional<std::string> parent_id;
  std::optional<Evaluation> evaluation;

  [[nodiscard]] bool evaluated() const noexcept { return evaluation.has_value(); }
  // Both throw UsageError on an unevaluated candidate.
  [[nodiscard]] const ObjectiveVector& objectives() const;
  [[nodiscard]] double deviation() const;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

[[nodiscard]] std::string make_candidate_id(std::uint32_t generation, std::uint32_t birth_index);

} // namespace promptevo
