#include "promptevo/selection.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "promptevo/errors.hpp"

namespace promptevo {

namespace {

constexpr double infinity = std::numeric_limits<double>::infinity();

// Flattens objectives/deviations for the kernels.
struct Flat {
  std::vector<double> objectives;
  std::vector<double> deviations;
  std::size_t q = 0;

  explicit Flat(std::span<const Candidate> pop) {
    if (!pop.empty()) q = pop.front().objectives().size();
    objectives.reserve(pop.size() * q);
    deviations.reserve(pop.size());
    for (const auto& c : pop) {
      const auto& y = c.objectives();
      if (y.size() != q) {
        throw UsageError("population mixes objective counts");
      }
      objectives.insert(objectives.end(), y.values().begin(), y.values().end());
      deviations.push_back(c.deviation());
    }
  }

  kernels::PopulationView view() const { return {objectives, deviations, q}; }
};

bool better(std::size_t a, std::size_t b, std::span<const Candidate> pop, const FrontPartition& p) {
  if (p.rank[a] != p.rank[b]) return p.rank[a] < p.rank[b];
  if (p.crowding[a] != p.crowding[b]) return p.crowding[a] > p.crowding[b];
  return pop[a].id < pop[b].id;
}

} // namespace

FrontPartition fast_nondominated_sort(std::span<const Candidate> pop, double bound, kernels::Backend backend) {
  FrontPartition out;
  const std::size_t n = pop.size();
  out.rank.assign(n, 0);
  if (n == 0) {
    return out;
  }
  const Flat flat(pop);
  const auto dom = kernels::constrained_domination_matrix(flat.view(), bound, backend);

  std::vector<std::size_t> dominated_by_count(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      dominated_by_count[j] += dom[i * n + j];
    }
  }
  std::vector<std::size_t> current;
  for (std::size_t i = 0; i < n; ++i) {
    if (dominated_by_count[i] == 0) current.push_back(i);
  }
  std::size_t rank = 0;
  while (!current.empty()) {
    std::vector<std::size_t> next;
    for (std::size_t i : current) {
      out.rank[i] = rank;
      for (std::size_t j = 0; j < n; ++j) {
        if (dom[i * n + j] && --dominated_by_count[j] == 0) {
          next.push_back(j);
        }
      }
    }
    std::sort(next.begin(), next.end());
    out.fronts.push_back(std::move(current));
    current = std::move(next);
    ++rank;
  }
  return out;
}

std::vector<double> crowding_distance(std::span<const Candidate> front) {
  const std::size_t n = front.size();
  std::vector<double> distance(n, 0.0);
  if (n <= 2) {
    std::fill(distance.begin(), distance.end(), infinity);
    return distance;
  }
  const std::size_t q = front.front().objectives().size();
  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < q; ++k) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double ya = front[a].objectives()[k];
      const double yb = front[b].objectives()[k];
      if (ya != yb) return ya < yb;
      return front[a].id < front[b].id;
    });
    const double lo = front[order.front()].objectives()[k];
    const double hi = front[order.back()].objectives()[k];
    distance[order.front()] = infinity;
    distance[order.back()] = infinity;
    if (hi == lo) {
      continue;
    }
    for (std::size_t t = 1; t + 1 < n; ++t) {
      const double gap = front[order[t + 1]].objectives()[k] - front[order[t - 1]].objectives()[k];
      distance[order[t]] += gap / (hi - lo);
    }
  }
  return distance;
}

void assign_crowding(FrontPartition& partition, std::span<const Candidate> pop) {
  partition.crowding.assign(pop.size(), 0.0);
  std::vector<Candidate> members;
  for (const auto& front : partition.fronts) {
    members.clear();
    for (std::size_t i : front) members.push_back(pop[i]);
    const auto d = crowding_distance(members);
    for (std::size_t t = 0; t < front.size(); ++t) {
      partition.crowding[front[t]] = d[t];
    }
  }
}

std::size_t tournament_select(std::span<const Candidate> pop, const FrontPartition& partition, SeedStream& rng,
                              std::size_t k) {
  if (pop.empty()) {
    throw UsageError("tournament_select: empty population");
  }
  if (k < 2) {
    throw UsageError("tournament_select: k must be >= 2");
  }
  if (partition.size() != pop.size() || partition.crowding.size() != pop.size()) {
    throw UsageError("tournament_select: partition does not cover the population");
  }
  std::size_t winner = rng.next_below(pop.size());
  for (std::size_t draw = 1; draw < k; ++draw) {
    const std::size_t challenger = rng.next_below(pop.size());
    if (better(challenger, winner, pop, partition)) {
      winner = challenger;
    }
  }
  return winner;
}

std::vector<Candidate> environmental_selection(std::vector<Candidate> pool, std::size_t mu, double bound) {
  auto by_id = [](const Candidate& a, const Candidate& b) { return a.id < b.id; };
  if (mu >= pool.size()) {
    std::sort(pool.begin(), pool.end(), by_id);
    return pool;
  }
  const auto partition = fast_nondominated_sort(pool, bound);
  std::vector<Candidate> chosen;
  chosen.reserve(mu);
  for (const auto& front : partition.fronts) {
    if (chosen.size() + front.size() <= mu) {
      for (std::size_t i : front) chosen.push_back(pool[i]);
      if (chosen.size() == mu) break;
      continue;
    }
    std::vector<Candidate> members;
    for (std::size_t i : front) members.push_back(pool[i]);
    const auto d = crowding_distance(members);
    std::vector<std::size_t> order(members.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (d[a] != d[b]) return d[a] > d[b];
      return members[a].id < members[b].id;
    });
    for (std::size_t t = 0; chosen.size() < mu; ++t) {
      chosen.push_back(std::move(members[order[t]]));
    }
    break;
  }
  std::sort(chosen.begin(), chosen.end(), by_id);
  return chosen;
}

} // namespace promptevo
