#pragma once

#include <vector>

#include "promptevo/types.hpp"

namespace promptevo {

// Every feasible, mutually non-dominated candidate seen so far. Members are
// kept sorted by id. Candidates with identical objective vectors do not
// dominate each other and are all retained.
class ParetoArchive {
public:
  explicit ParetoArchive(double bound) : bound_(bound) {}

  // Returns true if the candidate entered the archive.
  bool insert(const Candidate& candidate);

  [[nodiscard]] const std::vector<Candidate>& members() const noexcept { return members_; }
  [[nodiscard]] std::size_t size() const noexcept { return members_.size(); }
  [[nodiscard]] double bound() const noexcept { return bound_; }

private:
  double bound_;
  std::vector<Candidate> members_;
};

} // namespace promptevo
