#include "promptevo/archive.hpp"

#include <algorithm>

#include "promptevo/dominance.hpp"
#include "promptevo/objectives.hpp"

namespace promptevo {

bool ParetoArchive::insert(const Candidate& candidate) {
  if (!is_feasible(candidate, bound_)) {
    return false;
  }
  const auto& y = candidate.objectives();
  for (const auto& m : members_) {
    if (dominates(m.objectives(), y)) {
      return false;
    }
  }
  std::erase_if(members_, [&](const Candidate& m) { return dominates(y, m.objectives()); });
  auto pos = std::lower_bound(members_.begin(), members_.end(), candidate.id,
                              [](const Candidate& m, const std::string& id) { return m.id < id; });
  members_.insert(pos, candidate);
  return true;
}

} // namespace promptevo
