#pragma once

#include <algorithm>
#include <cassert>
#include <compare>
#include <limits>
#include <string>
#include <vector>

#include "csr/error.hpp"
#include "csr/graph.hpp"

namespace csr {

// Distance to the nearest other copy of an agent's resource. Unbounded means
// no other node holds it; it orders above every finite value, so unique
// holders are never unsatisfied.
struct Radius {
  static constexpr int kUnboundedKey = std::numeric_limits<int>::max();

  int key = kUnboundedKey;

  static Radius finite(int r) {
    assert(r >= 0 && r < kUnboundedKey);
    return Radius{r};
  }
  static Radius unbounded() { return Radius{kUnboundedKey}; }

  bool is_unbounded() const { return key == kUnboundedKey; }
  bool is_finite() const { return !is_unbounded(); }
  int value() const {
    assert(is_finite());
    return key;
  }

  auto operator<=>(const Radius&) const = default;
};

// Per-radius histogram (n_1..n_D) plus the count of unbounded agents. The
// finite prefix carries the lexicographic order; unbounded counts only break
// exact prefix ties.
struct RadiusVector {
  std::vector<int> counts;  // counts[r-1] = number of agents at radius r, r = 1..D
  int unbounded_count = 0;

  bool operator==(const RadiusVector&) const = default;
};

inline std::strong_ordering lex_compare(const RadiusVector& a, const RadiusVector& b) {
  assert(a.counts.size() == b.counts.size());
  for (std::size_t i = 0; i < a.counts.size(); ++i) {
    if (a.counts[i] != b.counts[i]) {
      return a.counts[i] < b.counts[i] ? std::strong_ordering::less : std::strong_ordering::greater;
    }
  }
  if (a.unbounded_count != b.unbounded_count) {
    return a.unbounded_count < b.unbounded_count ? std::strong_ordering::less
                                                 : std::strong_ordering::greater;
  }
  return std::strong_ordering::equal;
}

// One cached resource per node. values()[i] is the resource of node i+1; use
// at()/set() with 1-based node labels.
class AllocationProfile {
 public:
  AllocationProfile() = default;
  AllocationProfile(int n, int resource) : held_(n, resource) {}
  AllocationProfile(std::initializer_list<int> values) : held_(values) {}
  explicit AllocationProfile(std::vector<int> values) : held_(std::move(values)) {}

  int size() const { return static_cast<int>(held_.size()); }
  int at(int node) const { return held_[node - 1]; }
  void set(int node, int resource) { held_[node - 1] = resource; }
  const std::vector<int>& values() const { return held_; }

  bool operator==(const AllocationProfile&) const = default;

 private:
  std::vector<int> held_;
};

inline void validate_profile(const AllocationProfile& p, int n, int k) {
  if (p.size() != n) {
    throw Error("profile length " + std::to_string(p.size()) + " does not match n=" +
                std::to_string(n));
  }
  for (int i = 1; i <= n; ++i) {
    if (p.at(i) < 1 || p.at(i) > k) {
      throw Error("node " + std::to_string(i) + " holds resource " + std::to_string(p.at(i)) +
                  " outside 1.." + std::to_string(k));
    }
  }
}

// Graph plus precomputed distances plus the resource count. The distance
// matrix is shared by everything downstream, so it is computed once here.
struct Game {
  Graph graph;
  DistanceMatrix dist;
  int k = 1;

  Game() = default;
  Game(Graph g, int resources) : graph(std::move(g)), dist(all_pairs_distances(graph)), k(resources) {
    if (k < 1) throw Error("resource count must be >= 1, got " + std::to_string(k));
  }

  int n() const { return graph.n; }
  int diameter() const { return dist.diameter(); }
};

// Distance from node to the nearest *other* node holding the resource.
inline Radius nearest_other_holder(const Game& game, const AllocationProfile& p, int node,
                                   int resource) {
  int best = Radius::kUnboundedKey;
  for (int j = 1; j <= game.n(); ++j) {
    if (j != node && p.at(j) == resource) best = std::min(best, game.dist.at(node, j));
  }
  return Radius{best};
}

inline Radius radius_of(const Game& game, const AllocationProfile& p, int node) {
  return nearest_other_holder(game, p, node, p.at(node));
}

struct BestResponse {
  std::vector<int> resources;  // all maximizers, ascending
  Radius achieved;

  // Tie-break: lowest resource index.
  int canonical() const { return resources.front(); }
};

inline BestResponse best_responses(const Game& game, const AllocationProfile& p, int node) {
  BestResponse out;
  out.achieved = Radius::finite(0);
  for (int o = 1; o <= game.k; ++o) {
    Radius r = nearest_other_holder(game, p, node, o);
    if (r > out.achieved) {
      out.achieved = r;
      out.resources.assign(1, o);
    } else if (r == out.achieved) {
      out.resources.push_back(o);
    }
  }
  return out;
}

inline bool is_unsatisfied(const Game& game, const AllocationProfile& p, int node) {
  return best_responses(game, p, node).achieved > radius_of(game, p, node);
}

inline bool is_equilibrium(const Game& game, const AllocationProfile& p) {
  for (int i = 1; i <= game.n(); ++i) {
    if (is_unsatisfied(game, p, i)) return false;
  }
  return true;
}

inline RadiusVector radius_vector(const Game& game, const AllocationProfile& p) {
  RadiusVector rv;
  rv.counts.assign(game.diameter(), 0);
  for (int i = 1; i <= game.n(); ++i) {
    Radius r = radius_of(game, p, i);
    if (r.is_unbounded()) {
      ++rv.unbounded_count;
    } else {
      ++rv.counts[r.value() - 1];
    }
  }
  return rv;
}

// Per-node, per-resource nonnegative weights for the generalized utility.
struct WeightTable {
  std::vector<std::vector<double>> w;  // w[node-1][resource-1]

  static WeightTable uniform(int n, int k, double value = 1.0) {
    WeightTable t;
    t.w.assign(n, std::vector<double>(k, value));
    return t;
  }

  double at(int node, int resource) const { return w[node - 1][resource - 1]; }
};

// U_i = -sum_o w_i(o) * d(i, nearest holder of o), where the agent's own cache
// counts at distance zero. Positive weight on a resource nobody holds is an
// error; zero weight just skips the term.
inline double weighted_utility(const Game& game, const AllocationProfile& p, int node,
                               const WeightTable& weights) {
  double total = 0.0;
  for (int o = 1; o <= game.k; ++o) {
    double w = weights.at(node, o);
    if (w == 0.0) continue;
    int best = p.at(node) == o ? 0 : Radius::kUnboundedKey;
    if (best != 0) {
      for (int j = 1; j <= game.n(); ++j) {
        if (j != node && p.at(j) == o) best = std::min(best, game.dist.at(node, j));
      }
      if (best == Radius::kUnboundedKey) {
        throw MissingResourceError("resource " + std::to_string(o) + " has positive weight at node " +
                                   std::to_string(node) + " but no holder");
      }
    }
    total -= w * best;
  }
  return total;
}

// --- capacitated (multi-cache) variant -------------------------------------

// Node i holds a set of C_i distinct resources.
struct MultiAllocationProfile {
  std::vector<std::vector<int>> assignment;  // assignment[node-1], sorted, distinct

  int size() const { return static_cast<int>(assignment.size()); }
  const std::vector<int>& at(int node) const { return assignment[node - 1]; }
  int capacity(int node) const { return static_cast<int>(assignment[node - 1].size()); }
  bool holds(int node, int resource) const {
    const auto& a = assignment[node - 1];
    return std::binary_search(a.begin(), a.end(), resource);
  }
};

inline void validate_multi_profile(const MultiAllocationProfile& p, int n, int k) {
  if (p.size() != n) {
    throw Error("multi profile length " + std::to_string(p.size()) + " does not match n=" +
                std::to_string(n));
  }
  for (int i = 1; i <= n; ++i) {
    const auto& a = p.at(i);
    if (a.empty() || static_cast<int>(a.size()) > k) {
      throw Error("node " + std::to_string(i) + " holds " + std::to_string(a.size()) +
                  " resources, want 1.." + std::to_string(k));
    }
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (a[j] < 1 || a[j] > k) {
        throw Error("node " + std::to_string(i) + " holds resource " + std::to_string(a[j]) +
                    " outside 1.." + std::to_string(k));
      }
      if (j > 0 && a[j] <= a[j - 1]) {
        throw Error("node " + std::to_string(i) + " assignment not sorted/distinct");
      }
    }
  }
}

// Distance from node to the nearest other node holding the resource.
inline Radius multi_rho(const Game& game, const MultiAllocationProfile& p, int node, int resource) {
  int best = Radius::kUnboundedKey;
  for (int j = 1; j <= game.n(); ++j) {
    if (j != node && p.holds(j, resource)) best = std::min(best, game.dist.at(node, j));
  }
  return Radius{best};
}

// Total order on achieved multisets of rho values: more unbounded entries win,
// then the larger finite sum.
struct MultiValue {
  int unbounded_count = 0;
  long long finite_sum = 0;

  auto operator<=>(const MultiValue&) const = default;
};

inline MultiValue multi_value_of(const std::vector<Radius>& rhos) {
  MultiValue v;
  for (Radius r : rhos) {
    if (r.is_unbounded()) {
      ++v.unbounded_count;
    } else {
      v.finite_sum += r.value();
    }
  }
  return v;
}

struct MultiBestResponse {
  std::vector<int> resources;  // chosen set, sorted ascending
  MultiValue value;
};

// Greedy top-C_i by (rho desc, resource index asc). Exact for this objective:
// swapping any chosen resource for a skipped one cannot raise the value.
inline MultiBestResponse multi_best_response(const Game& game, const MultiAllocationProfile& p,
                                             int node) {
  const int cap = p.capacity(node);
  std::vector<std::pair<Radius, int>> ranked;
  ranked.reserve(game.k);
  for (int o = 1; o <= game.k; ++o) ranked.emplace_back(multi_rho(game, p, node, o), o);
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  MultiBestResponse out;
  std::vector<Radius> chosen;
  for (int i = 0; i < cap; ++i) {
    out.resources.push_back(ranked[i].second);
    chosen.push_back(ranked[i].first);
  }
  std::sort(out.resources.begin(), out.resources.end());
  out.value = multi_value_of(chosen);
  return out;
}

inline MultiValue multi_current_value(const Game& game, const MultiAllocationProfile& p, int node) {
  std::vector<Radius> rhos;
  for (int o : p.at(node)) rhos.push_back(multi_rho(game, p, node, o));
  return multi_value_of(rhos);
}

inline bool multi_is_unsatisfied(const Game& game, const MultiAllocationProfile& p, int node) {
  return multi_best_response(game, p, node).value > multi_current_value(game, p, node);
}

inline bool multi_is_equilibrium(const Game& game, const MultiAllocationProfile& p) {
  for (int i = 1; i <= game.n(); ++i) {
    if (multi_is_unsatisfied(game, p, i)) return false;
  }
  return true;
}

}  // namespace csr
