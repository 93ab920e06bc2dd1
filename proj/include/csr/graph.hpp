#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "csr/error.hpp"
#include "csr/rng.hpp"

namespace csr {

// Undirected, simple, connected graph. Node labels are 1..n on every public
// interface. Immutable after construction; build via load_graph or generate.
struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;  // normalized u < v, sorted
  std::vector<std::vector<int>> adj;       // adj[0] unused; neighbor lists sorted

  int edge_count() const { return static_cast<int>(edges.size()); }
  int degree(int v) const { return static_cast<int>(adj[v].size()); }
  const std::vector<int>& neighbors(int v) const { return adj[v]; }

  int min_degree() const {
    int d = n > 0 ? degree(1) : 0;
    for (int v = 2; v <= n; ++v) d = std::min(d, degree(v));
    return d;
  }

  std::vector<int> degrees() const {
    std::vector<int> d(n);
    for (int v = 1; v <= n; ++v) d[v - 1] = degree(v);
    return d;
  }

  bool has_edge(int u, int v) const {
    if (u == v) return false;
    const auto& a = adj[u];
    return std::binary_search(a.begin(), a.end(), v);
  }
};

namespace detail {

inline bool connected_from_node_one(int n, const std::vector<std::vector<int>>& adj) {
  if (n <= 1) return true;
  std::vector<char> seen(n + 1, 0);
  std::vector<int> stack{1};
  seen[1] = 1;
  int reached = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : adj[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == n;
}

// Shared by load_graph and the generators. Duplicate edges collapse silently;
// self loops and bad labels throw.
inline Graph build_graph(int n, std::vector<std::pair<int, int>> edge_list) {
  if (n < 1) throw LabelOutOfRangeError("graph needs at least one node, got n=" + std::to_string(n));
  for (auto& [u, v] : edge_list) {
    if (u < 1 || u > n || v < 1 || v > n) {
      throw LabelOutOfRangeError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                                 ") outside 1.." + std::to_string(n));
    }
    if (u == v) throw SelfLoopError("self loop at node " + std::to_string(u));
    if (u > v) std::swap(u, v);
  }
  std::sort(edge_list.begin(), edge_list.end());
  edge_list.erase(std::unique(edge_list.begin(), edge_list.end()), edge_list.end());

  Graph g;
  g.n = n;
  g.edges = std::move(edge_list);
  g.adj.assign(n + 1, {});
  for (auto [u, v] : g.edges) {
    g.adj[u].push_back(v);
    g.adj[v].push_back(u);
  }
  for (int v = 1; v <= n; ++v) std::sort(g.adj[v].begin(), g.adj[v].end());

  if (!connected_from_node_one(n, g.adj)) {
    // Name one unreachable node so the message is actionable.
    std::vector<char> seen(n + 1, 0);
    std::vector<int> stack{1};
    seen[1] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w : g.adj[v]) {
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
      }
    }
    int missing = 0;
    for (int v = 1; v <= n; ++v) {
      if (!seen[v]) {
        missing = v;
        break;
      }
    }
    throw DisconnectedError("graph is disconnected: node " + std::to_string(missing) +
                            " unreachable from node 1");
  }
  return g;
}

}  // namespace detail

inline Graph load_graph(int n, std::vector<std::pair<int, int>> edge_list) {
  return detail::build_graph(n, std::move(edge_list));
}

// Hop-count matrix for all node pairs, plus the diameter.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(int n, std::vector<int> flat) : n_(n), d_(std::move(flat)) {
    for (int x : d_) diameter_ = std::max(diameter_, x);
  }

  int at(int u, int v) const { return d_[static_cast<std::size_t>(u - 1) * n_ + (v - 1)]; }
  int size() const { return n_; }
  int diameter() const { return diameter_; }

 private:
  int n_ = 0;
  int diameter_ = 0;
  std::vector<int> d_;
};

// BFS from every node. O(n * (n + m)).
inline DistanceMatrix all_pairs_distances(const Graph& g) {
  const int n = g.n;
  std::vector<int> flat(static_cast<std::size_t>(n) * n, -1);
  std::vector<int> queue(n);
  for (int s = 1; s <= n; ++s) {
    int* row = flat.data() + static_cast<std::size_t>(s - 1) * n;
    row[s - 1] = 0;
    int head = 0, tail = 0;
    queue[tail++] = s;
    while (head < tail) {
      int v = queue[head++];
      int dv = row[v - 1];
      for (int w : g.adj[v]) {
        if (row[w - 1] < 0) {
          row[w - 1] = dv + 1;
          queue[tail++] = w;
        }
      }
    }
  }
  return DistanceMatrix(n, std::move(flat));
}

// Closed ball around center: all nodes within distance radius, sorted.
inline std::vector<int> ball(const Graph& g, int center, int radius) {
  if (center < 1 || center > g.n) {
    throw LabelOutOfRangeError("ball center " + std::to_string(center) + " outside 1.." +
                               std::to_string(g.n));
  }
  std::vector<int> dist(g.n + 1, -1);
  std::vector<int> queue{center};
  dist[center] = 0;
  std::size_t head = 0;
  while (head < queue.size()) {
    int v = queue[head++];
    if (dist[v] == radius) continue;
    for (int w : g.adj[v]) {
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
    }
  }
  std::sort(queue.begin(), queue.end());
  return queue;
}

// G^(r): edge between u != v iff their distance in g is between 1 and r.
// r >= 1, so the result stays connected whenever g is.
inline Graph graph_power(const Graph& g, const DistanceMatrix& dist, int r) {
  if (r < 1) throw Error("graph power needs r >= 1, got " + std::to_string(r));
  std::vector<std::pair<int, int>> edges;
  for (int u = 1; u <= g.n; ++u) {
    for (int v = u + 1; v <= g.n; ++v) {
      if (dist.at(u, v) <= r) edges.emplace_back(u, v);
    }
  }
  return detail::build_graph(g.n, std::move(edges));
}

inline Graph graph_power(const Graph& g, int r) {
  return graph_power(g, all_pairs_distances(g), r);
}

// Largest adjacency eigenvalue. Power iteration from the all-ones vector on
// A + I; the shift keeps the iteration from oscillating on bipartite graphs
// and leaves the Rayleigh quotient of A unchanged. Stops once successive
// estimates differ by less than tol.
inline double spectral_radius(const Graph& g, double tol = 1e-6) {
  const int n = g.n;
  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> y(n);
  double prev = -1e300;
  const long max_iter = 200000 + 50L * n;
  for (long iter = 0; iter < max_iter; ++iter) {
    double lambda = 0.0;  // Rayleigh quotient x' A x with ||x|| = 1
    for (int v = 1; v <= n; ++v) {
      double s = 0.0;
      for (int w : g.adj[v]) s += x[w - 1];
      y[v - 1] = s + x[v - 1];
      lambda += x[v - 1] * s;
    }
    if (std::abs(lambda - prev) < tol) return lambda;
    prev = lambda;
    double norm = 0.0;
    for (double t : y) norm += t * t;
    norm = std::sqrt(norm);
    for (int i = 0; i < n; ++i) x[i] = y[i] / norm;
  }
  return prev;
}

struct GraphStats {
  int diameter = 0;
  std::vector<int> degrees;
  int min_degree = 0;
  double spectral_radius = 0.0;
};

inline GraphStats compute_stats(const Graph& g, double tol = 1e-6) {
  GraphStats s;
  s.diameter = all_pairs_distances(g).diameter();
  s.degrees = g.degrees();
  s.min_degree = g.min_degree();
  s.spectral_radius = spectral_radius(g, tol);
  return s;
}

enum class GraphKind { path, cycle, star, complete, grid, random_tree, erdos_renyi };

inline const char* kind_name(GraphKind k) {
  switch (k) {
    case GraphKind::path: return "path";
    case GraphKind::cycle: return "cycle";
    case GraphKind::star: return "star";
    case GraphKind::complete: return "complete";
    case GraphKind::grid: return "grid";
    case GraphKind::random_tree: return "random_tree";
    case GraphKind::erdos_renyi: return "erdos_renyi";
  }
  return "?";
}

inline GraphKind parse_kind(const std::string& name) {
  for (GraphKind k : {GraphKind::path, GraphKind::cycle, GraphKind::star, GraphKind::complete,
                      GraphKind::grid, GraphKind::random_tree, GraphKind::erdos_renyi}) {
    if (name == kind_name(k)) return k;
  }
  throw Error("unknown graph kind: " + name);
}

namespace detail {

inline Graph generate_random_tree(int n, std::mt19937_64& rng) {
  std::vector<std::pair<int, int>> edges;
  if (n == 2) {
    edges.emplace_back(1, 2);
  } else if (n >= 3) {
    // Uniform labeled tree via a random Prufer sequence.
    std::vector<int> prufer(n - 2);
    for (int& x : prufer) x = 1 + static_cast<int>(rng_below(rng, n));
    std::vector<int> deg(n + 1, 1);
    for (int x : prufer) ++deg[x];
    std::priority_queue<int, std::vector<int>, std::greater<int>> leaves;
    for (int v = 1; v <= n; ++v) {
      if (deg[v] == 1) leaves.push(v);
    }
    for (int x : prufer) {
      int leaf = leaves.top();
      leaves.pop();
      edges.emplace_back(leaf, x);
      if (--deg[x] == 1) leaves.push(x);
    }
    int a = leaves.top();
    leaves.pop();
    int b = leaves.top();
    edges.emplace_back(a, b);
  }
  return build_graph(n, std::move(edges));
}

inline Graph generate_erdos_renyi(int n, double p, std::mt19937_64& rng) {
  constexpr int kMaxAttempts = 1000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::vector<std::pair<int, int>> edges;
    for (int u = 1; u <= n; ++u) {
      for (int v = u + 1; v <= n; ++v) {
        if (rng_unit(rng) < p) edges.emplace_back(u, v);
      }
    }
    std::vector<std::vector<int>> adj(n + 1);
    for (auto [u, v] : edges) {
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
    if (connected_from_node_one(n, adj)) return build_graph(n, std::move(edges));
  }
  throw GenerationFailedError("no connected erdos_renyi sample after " +
                              std::to_string(kMaxAttempts) + " attempts (n=" + std::to_string(n) +
                              ", p=" + std::to_string(p) + ")");
}

}  // namespace detail

// Deterministic for a fixed (kind, n, p, seed). p is only read by erdos_renyi.
inline Graph generate(GraphKind kind, int n, double p = 0.0, std::uint64_t seed = 0) {
  if (n < 1) throw LabelOutOfRangeError("generate needs n >= 1, got " + std::to_string(n));
  std::vector<std::pair<int, int>> edges;
  switch (kind) {
    case GraphKind::path:
      for (int v = 1; v < n; ++v) edges.emplace_back(v, v + 1);
      break;
    case GraphKind::cycle:
      for (int v = 1; v < n; ++v) edges.emplace_back(v, v + 1);
      if (n >= 3) edges.emplace_back(1, n);
      break;
    case GraphKind::star:
      for (int v = 2; v <= n; ++v) edges.emplace_back(1, v);
      break;
    case GraphKind::complete:
      for (int u = 1; u <= n; ++u) {
        for (int v = u + 1; v <= n; ++v) edges.emplace_back(u, v);
      }
      break;
    case GraphKind::grid: {
      // Near-square lattice, row-major labels, last row possibly partial.
      int rows = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(n))));
      int cols = (n + rows - 1) / rows;
      auto id = [cols](int r, int c) { return r * cols + c + 1; };
      for (int v = 1; v <= n; ++v) {
        int r = (v - 1) / cols, c = (v - 1) % cols;
        if (c + 1 < cols && id(r, c + 1) <= n) edges.emplace_back(v, id(r, c + 1));
        if (id(r + 1, c) <= n) edges.emplace_back(v, id(r + 1, c));
      }
      break;
    }
    case GraphKind::random_tree: {
      std::mt19937_64 rng(seed);
      return detail::generate_random_tree(n, rng);
    }
    case GraphKind::erdos_renyi: {
      if (!(p >= 0.0 && p <= 1.0)) throw Error("erdos_renyi needs p in [0,1]");
      std::mt19937_64 rng(seed);
      return detail::generate_erdos_renyi(n, p, rng);
    }
  }
  return detail::build_graph(n, std::move(edges));
}

}  // namespace csr
