#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "csr/game.hpp"

namespace csr {

struct TreeOrder {
  int root = 0;
  std::vector<int> levels;       // levels[v-1] = BFS depth of node v from root
  std::vector<int> visit_order;  // ascending level, ties by ascending index
};

inline TreeOrder tree_order(const Game& game, int root) {
  if (root < 1 || root > game.n()) {
    throw LabelOutOfRangeError("root " + std::to_string(root) + " outside 1.." +
                               std::to_string(game.n()));
  }
  TreeOrder order;
  order.root = root;
  order.levels.resize(game.n());
  for (int v = 1; v <= game.n(); ++v) order.levels[v - 1] = game.dist.at(root, v);
  order.visit_order.resize(game.n());
  std::iota(order.visit_order.begin(), order.visit_order.end(), 1);
  std::sort(order.visit_order.begin(), order.visit_order.end(), [&](int a, int b) {
    if (order.levels[a - 1] != order.levels[b - 1]) {
      return order.levels[a - 1] < order.levels[b - 1];
    }
    return a < b;
  });
  return order;
}

namespace detail {

// Distance from node to the nearest allocated holder of o; entries of 0 in
// res mean unallocated. Unallocated resources count as unbounded.
inline int partial_rho(const Game& game, const std::vector<int>& res, int node, int o) {
  int best = Radius::kUnboundedKey;
  for (int j = 1; j <= game.n(); ++j) {
    if (j != node && res[j] == o) best = std::min(best, game.dist.at(node, j));
  }
  return best;
}

}  // namespace detail

struct TreeSolveResult {
  AllocationProfile profile;
  TreeOrder order;
};

// Sequential allocation on a tree: visit root-first by BFS level, each node
// best-responds against the already-allocated nodes only. Resource ties break
// to the lowest index. The result is an equilibrium of the full game.
inline TreeSolveResult solve_tree(const Game& game, int root) {
  if (game.graph.edge_count() != game.n() - 1) {
    throw NotATreeError("graph has " + std::to_string(game.graph.edge_count()) +
                        " edges, a tree on " + std::to_string(game.n()) + " nodes has " +
                        std::to_string(game.n() - 1));
  }
  TreeSolveResult result;
  result.order = tree_order(game, root);
  std::vector<int> res(game.n() + 1, 0);
  for (int v : result.order.visit_order) {
    int best = -1, pick = 1;
    for (int o = 1; o <= game.k; ++o) {
      int r = detail::partial_rho(game, res, v, o);
      if (r > best) {
        best = r;
        pick = o;
      }
    }
    res[v] = pick;
  }
  result.profile = AllocationProfile(std::vector<int>(res.begin() + 1, res.end()));
  return result;
}

// Replays solve_tree and checks, after every single allocation, that no
// already-allocated node can strictly improve against the allocated set, and
// that the final profile is an equilibrium of the full game.
inline bool verify_theorem1(const Game& game, int root) {
  TreeOrder order = tree_order(game, root);
  if (game.graph.edge_count() != game.n() - 1) return false;
  std::vector<int> res(game.n() + 1, 0);
  for (std::size_t idx = 0; idx < order.visit_order.size(); ++idx) {
    int v = order.visit_order[idx];
    int best = -1, pick = 1;
    for (int o = 1; o <= game.k; ++o) {
      int r = detail::partial_rho(game, res, v, o);
      if (r > best) {
        best = r;
        pick = o;
      }
    }
    res[v] = pick;
    for (std::size_t j = 0; j <= idx; ++j) {
      int u = order.visit_order[j];
      int current = detail::partial_rho(game, res, u, res[u]);
      for (int o = 1; o <= game.k; ++o) {
        if (detail::partial_rho(game, res, u, o) > current) return false;
      }
    }
  }
  AllocationProfile profile(std::vector<int>(res.begin() + 1, res.end()));
  return is_equilibrium(game, profile);
}

}  // namespace csr
