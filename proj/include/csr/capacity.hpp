#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "csr/dynamics.hpp"
#include "csr/game.hpp"
#include "csr/simplex.hpp"

namespace csr {

struct CapacityVector {
  std::vector<int> caps;  // caps[node-1] >= 1

  int at(int node) const { return caps[node - 1]; }
  int size() const { return static_cast<int>(caps.size()); }
  int total() const { return std::accumulate(caps.begin(), caps.end(), 0); }
  int min_cap() const { return *std::min_element(caps.begin(), caps.end()); }
};

inline void validate_capacities(const CapacityVector& c, int n, int k) {
  if (c.size() != n) {
    throw Error("capacity vector length " + std::to_string(c.size()) + " does not match n=" +
                std::to_string(n));
  }
  for (int i = 1; i <= n; ++i) {
    if (c.at(i) < 1 || c.at(i) > k) {
      throw Error("capacity of node " + std::to_string(i) + " is " + std::to_string(c.at(i)) +
                  ", want 1.." + std::to_string(k));
    }
  }
}

// Unit-capacity view of a capacitated instance: node i becomes C_i mutually
// adjacent clones, and clones of adjacent originals are fully connected.
// Distances collapse back exactly: d(clone of i, clone of j) = d(i, j) for
// i != j, and 1 between siblings.
struct ExpandedGame {
  Graph expanded;
  std::vector<int> clone_of;            // clone_of[x-1] = original of expanded node x
  std::vector<std::vector<int>> clones; // clones[i-1] = expanded nodes of original i
};

inline ExpandedGame expand_game(const Graph& g, const CapacityVector& caps) {
  if (caps.size() != g.n) {
    throw Error("capacity vector length " + std::to_string(caps.size()) + " does not match n=" +
                std::to_string(g.n));
  }
  ExpandedGame eg;
  eg.clones.resize(g.n);
  int next = 1;
  for (int i = 1; i <= g.n; ++i) {
    if (caps.at(i) < 1) throw Error("capacity of node " + std::to_string(i) + " must be >= 1");
    for (int c = 0; c < caps.at(i); ++c) eg.clones[i - 1].push_back(next++);
  }
  const int total = next - 1;
  eg.clone_of.resize(total);
  for (int i = 1; i <= g.n; ++i) {
    for (int x : eg.clones[i - 1]) eg.clone_of[x - 1] = i;
  }
  std::vector<std::pair<int, int>> edges;
  for (auto [u, v] : g.edges) {
    for (int a : eg.clones[u - 1]) {
      for (int b : eg.clones[v - 1]) edges.emplace_back(a, b);
    }
  }
  for (int i = 1; i <= g.n; ++i) {
    const auto& cl = eg.clones[i - 1];
    for (std::size_t a = 0; a < cl.size(); ++a) {
      for (std::size_t b = a + 1; b < cl.size(); ++b) edges.emplace_back(cl[a], cl[b]);
    }
  }
  eg.expanded = load_graph(total, std::move(edges));
  return eg;
}

struct CollapseResult {
  MultiAllocationProfile profile;        // per-original distinct resources, sorted
  std::vector<int> duplicated_originals; // originals whose clones repeated a resource

  bool duplication_free() const { return duplicated_originals.empty(); }
};

inline CollapseResult collapse_profile(const ExpandedGame& eg, const AllocationProfile& expanded) {
  CollapseResult out;
  out.profile.assignment.resize(eg.clones.size());
  for (std::size_t i = 0; i < eg.clones.size(); ++i) {
    std::vector<int> held;
    for (int x : eg.clones[i]) held.push_back(expanded.at(x));
    std::sort(held.begin(), held.end());
    bool dup = std::adjacent_find(held.begin(), held.end()) != held.end();
    if (dup) out.duplicated_originals.push_back(static_cast<int>(i) + 1);
    held.erase(std::unique(held.begin(), held.end()), held.end());
    out.profile.assignment[i] = std::move(held);
  }
  return out;
}

// Expanded-game equilibria collapse to capacitated profiles with no improving
// single swap. True iff the expanded profile is an equilibrium, collapses
// without duplication, and no original node is multi-unsatisfied.
inline bool check_equivalence(const Game& original, const CapacityVector& caps,
                              const ExpandedGame& eg, const AllocationProfile& expanded) {
  validate_capacities(caps, original.n(), original.k);
  Game unit(eg.expanded, original.k);
  if (!is_equilibrium(unit, expanded)) return false;
  CollapseResult collapsed = collapse_profile(eg, expanded);
  if (!collapsed.duplication_free()) return false;
  for (int i = 1; i <= original.n(); ++i) {
    if (multi_is_unsatisfied(original, collapsed.profile, i)) return false;
  }
  return true;
}

// --- capacity planning (LP relaxation + rounding) ---------------------------

// min 1'y  s.t.  A y >= k*1 - d,  y >= 0.
inline LpResult solve_lp(const Graph& g, int k, LpOptions opts = {}) {
  if (g.n < 2) throw Error("capacity planning needs n >= 2 (degrees must be positive)");
  std::vector<std::vector<double>> A(g.n, std::vector<double>(g.n, 0.0));
  for (auto [u, v] : g.edges) {
    A[u - 1][v - 1] = 1.0;
    A[v - 1][u - 1] = 1.0;
  }
  std::vector<double> h(g.n), c(g.n, 1.0);
  for (int i = 1; i <= g.n; ++i) h[i - 1] = static_cast<double>(k - g.degree(i));
  return simplex_min_geq(A, h, c, opts);
}

struct CapacityPlan {
  std::vector<double> y_star;
  std::vector<int> y_ceil;
  long long total_extra = 0;  // sum of y_ceil
  double objective = 0.0;     // sum of y_star
  double normalized = 0.0;    // objective / n
  double lambda_max = 0.0;
  std::vector<double> dual;
};

inline CapacityPlan plan_capacity(const Graph& g, int k, LpOptions opts = {}) {
  LpResult lp = solve_lp(g, k, opts);
  if (lp.status != LpStatus::optimal) {
    // y = k*1 is always feasible on a connected graph, so this is a solver bug.
    throw NumericalFailureError("capacity LP reported infeasible on a connected graph");
  }
  CapacityPlan plan;
  plan.y_star = lp.x;
  plan.objective = lp.objective;
  plan.normalized = lp.objective / g.n;
  plan.dual = lp.dual;
  plan.y_ceil.resize(g.n);
  for (int i = 0; i < g.n; ++i) {
    double y = lp.x[i];
    double snapped = std::abs(y - std::round(y)) < 1e-7 ? std::round(y) : y;
    plan.y_ceil[i] = static_cast<int>(std::ceil(snapped));
    plan.y_ceil[i] = std::max(plan.y_ceil[i], 0);
  }
  plan.total_extra = std::accumulate(plan.y_ceil.begin(), plan.y_ceil.end(), 0LL);
  // The rounded plan must satisfy A y >= k - d exactly (integer arithmetic).
  for (int i = 1; i <= g.n; ++i) {
    long long got = 0;
    for (int j : g.neighbors(i)) got += plan.y_ceil[j - 1];
    if (got < k - g.degree(i)) {
      throw NumericalFailureError("rounded plan violates the covering row of node " +
                                  std::to_string(i));
    }
  }
  plan.lambda_max = spectral_radius(g);
  return plan;
}

struct IpResult {
  std::vector<int> y;
  long long total = 0;
};

// Exact integer optimum by branch and bound; meant for n <= 12. Values above
// k-1 never help (a neighbor at k-1 already satisfies any row), so the search
// space is {0..k-1}^n.
inline IpResult brute_force_ip(const Graph& g, int k, int size_limit = 12) {
  if (g.n > size_limit) {
    throw SizeLimitError("brute_force_ip limited to n <= " + std::to_string(size_limit) +
                         ", got n=" + std::to_string(g.n));
  }
  if (g.n < 2) throw Error("capacity planning needs n >= 2");
  const int n = g.n;
  const int cap = std::max(0, k - 1);
  std::vector<long long> rhs(n);
  for (int i = 1; i <= n; ++i) rhs[i - 1] = k - g.degree(i);

  // Descending degree order tightens rows early.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 1);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (g.degree(a) != g.degree(b)) return g.degree(a) > g.degree(b);
    return a < b;
  });
  std::vector<int> pos(n + 1);
  for (int i = 0; i < n; ++i) pos[order[i]] = i;

  // Greedy warm start: raise the node covering the most deficient rows.
  std::vector<int> greedy(n, 0);
  {
    std::vector<long long> have(n, 0);
    auto deficient = [&]() {
      for (int i = 0; i < n; ++i) {
        if (have[i] < rhs[i]) return true;
      }
      return false;
    };
    while (deficient()) {
      int best_node = 1, best_gain = -1;
      for (int v = 1; v <= n; ++v) {
        if (greedy[v - 1] >= cap) continue;
        int gain = 0;
        for (int u : g.neighbors(v)) {
          if (have[u - 1] < rhs[u - 1]) ++gain;
        }
        if (gain > best_gain) {
          best_gain = gain;
          best_node = v;
        }
      }
      ++greedy[best_node - 1];
      for (int u : g.neighbors(best_node)) ++have[u - 1];
    }
  }

  IpResult best;
  best.y = greedy;
  best.total = std::accumulate(greedy.begin(), greedy.end(), 0LL);

  std::vector<int> current(n, 0);
  std::vector<long long> have(n, 0);
  std::vector<int> undecided(n, 0);  // undecided neighbors per row
  for (int i = 1; i <= n; ++i) undecided[i - 1] = g.degree(i);

  auto feasible_possible = [&]() {
    for (int i = 0; i < n; ++i) {
      if (have[i] + static_cast<long long>(cap) * undecided[i] < rhs[i]) return false;
    }
    return true;
  };

  std::function<void(int, long long)> dfs = [&](int idx, long long total) {
    if (total >= best.total) return;
    if (idx == n) {
      for (int i = 0; i < n; ++i) {
        if (have[i] < rhs[i]) return;
      }
      best.total = total;
      std::copy(current.begin(), current.end(), best.y.begin());
      return;
    }
    const int v = order[idx];
    for (int val = 0; val <= cap; ++val) {
      current[v - 1] = val;
      for (int u : g.neighbors(v)) {
        have[u - 1] += val;
        --undecided[u - 1];
      }
      if (feasible_possible()) dfs(idx + 1, total + val);
      for (int u : g.neighbors(v)) {
        have[u - 1] -= val;
        ++undecided[u - 1];
      }
    }
    current[v - 1] = 0;
  };
  dfs(0, 0);
  return best;
}

// Post-LBR step budgets for expanded instances: T <= 3C^3 min{D,k-1} in the
// dense regime (k <= C_min * d_min) and T <= C min{D,k-1} for k < 5. The
// trace must come from an lbr run on the expanded game; D is the expanded
// diameter carried by the trace, C its node count.
inline bool check_eq_TD(const Trace& trace, int c_min, int d_min_original) {
  const long long C = trace.n;
  const long long md = std::max<long long>(0, std::min<long long>(trace.k - 1, trace.diameter));
  const long long T = static_cast<long long>(trace.events.size());
  if (trace.k <= static_cast<long long>(c_min) * d_min_original) {
    if (T > 3 * C * C * C * md) return false;
  }
  if (trace.k < 5) {
    if (T > C * md) return false;
  }
  return true;
}

// Step budget for a planned instance: at most n*k clones, cubic in that.
inline long long planned_step_budget(int n, int k, int diameter) {
  const long long nk = static_cast<long long>(n) * k;
  const long long md = std::max(0, std::min(k - 1, diameter));
  return 3 * nk * nk * nk * md;
}

}  // namespace csr
