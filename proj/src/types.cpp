#include "promptevo/types.hpp"

#include <cmath>
#include <cstdio>

#include "promptevo/errors.hpp"

namespace promptevo {

PhenotypeRef::PhenotypeRef(std::string id, std::optional<Dims> dims)
    : id_(std::move(id)), dims_(dims) {
  if (id_.empty()) {
    throw ProtocolError("phenotype id must be non-empty");
  }
  if (dims_) {
    for (auto d : *dims_) {
      if (d == 0) {
        throw ProtocolError("phenotype dims must be strictly positive");
      }
    }
  }
}

ObjectiveVector::ObjectiveVector(std::vector<double> values) : values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ProtocolError("objective " + std::to_string(i) + " out of range [0,1]: " +
                          std::to_string(v));
    }
  }
}

const ObjectiveVector& Candidate::objectives() const {
  if (!evaluation) {
    throw UsageError("candidate " + id + " is not evaluated");
  }
  return evaluation->objectives;
}

double Candidate::deviation() const {
  if (!evaluation) {
    throw UsageError("candidate " + id + " is not evaluated");
  }
  return evaluation->deviation;
}

std::string make_candidate_id(std::uint32_t generation, std::uint32_t birth_index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "g%04u-%06u", generation, birth_index);
  return buf;
}

} // namespace promptevo
