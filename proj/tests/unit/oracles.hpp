#pragma once

// Independent reference implementations used to pin expected values. These
// deliberately avoid the library's own code paths wherever the library has a
// smarter algorithm: distances via Floyd-Warshall instead of BFS, eigenvalues
// via a dense solver instead of power iteration, best responses via plain
// exhaustive scans instead of incremental columns.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "csr/game.hpp"
#include "csr/graph.hpp"

namespace oracle {

inline std::vector<std::vector<int>> floyd_warshall(const csr::Graph& g) {
  const int n = g.n;
  const int inf = 1 << 28;
  std::vector<std::vector<int>> d(n + 1, std::vector<int>(n + 1, inf));
  for (int v = 1; v <= n; ++v) d[v][v] = 0;
  for (auto [u, v] : g.edges) d[u][v] = d[v][u] = 1;
  for (int m = 1; m <= n; ++m) {
    for (int i = 1; i <= n; ++i) {
      for (int j = 1; j <= n; ++j) {
        d[i][j] = std::min(d[i][j], d[i][m] + d[m][j]);
      }
    }
  }
  return d;
}

inline double dense_max_eigenvalue(const csr::Graph& g) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(g.n, g.n);
  for (auto [u, v] : g.edges) {
    a(u - 1, v - 1) = 1.0;
    a(v - 1, u - 1) = 1.0;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  return solver.eigenvalues().maxCoeff();
}

// Exhaustive deviation search over every agent and resource, straight from
// the distance matrix.
inline int rho(const std::vector<std::vector<int>>& dist, const std::vector<int>& held, int node,
               int resource) {
  int best = std::numeric_limits<int>::max();
  for (int j = 1; j < static_cast<int>(held.size()); ++j) {
    if (j != node && held[j] == resource) best = std::min(best, dist[node][j]);
  }
  return best;
}

inline bool agent_can_improve(const std::vector<std::vector<int>>& dist,
                              const std::vector<int>& held, int node, int k) {
  int current = rho(dist, held, node, held[node]);
  for (int o = 1; o <= k; ++o) {
    if (rho(dist, held, node, o) > current) return true;
  }
  return false;
}

inline bool is_equilibrium(const csr::Graph& g, const csr::AllocationProfile& p, int k) {
  auto dist = floyd_warshall(g);
  std::vector<int> held(g.n + 1, 0);
  for (int i = 1; i <= g.n; ++i) held[i] = p.at(i);
  for (int i = 1; i <= g.n; ++i) {
    if (agent_can_improve(dist, held, i, k)) return false;
  }
  return true;
}

// Best achievable (unbounded count, finite sum) over all C-subsets of the
// resource set, by full enumeration.
struct MultiValue {
  int unbounded = 0;
  long long finite = 0;

  friend bool operator>(const MultiValue& a, const MultiValue& b) {
    if (a.unbounded != b.unbounded) return a.unbounded > b.unbounded;
    return a.finite > b.finite;
  }
  friend bool operator==(const MultiValue& a, const MultiValue& b) {
    return a.unbounded == b.unbounded && a.finite == b.finite;
  }
};

inline MultiValue multi_value(const std::vector<int>& rhos) {
  MultiValue v;
  for (int r : rhos) {
    if (r == std::numeric_limits<int>::max()) {
      ++v.unbounded;
    } else {
      v.finite += r;
    }
  }
  return v;
}

inline MultiValue best_subset_value(const csr::Graph& g, const csr::MultiAllocationProfile& p,
                                    int node, int k) {
  auto dist = floyd_warshall(g);
  std::vector<int> rho_all(k + 1, 0);
  for (int o = 1; o <= k; ++o) {
    int best = std::numeric_limits<int>::max();
    for (int j = 1; j <= g.n; ++j) {
      if (j != node && p.holds(j, o)) best = std::min(best, dist[node][j]);
    }
    rho_all[o] = best;
  }
  const int cap = p.capacity(node);
  MultiValue best{-1, 0};
  std::vector<int> pick;
  std::function<void(int)> rec = [&](int next) {
    if (static_cast<int>(pick.size()) == cap) {
      std::vector<int> rhos;
      for (int o : pick) rhos.push_back(rho_all[o]);
      MultiValue v = multi_value(rhos);
      if (best.unbounded < 0 || v > best) best = v;
      return;
    }
    if (next > k) return;
    pick.push_back(next);
    rec(next + 1);
    pick.pop_back();
    rec(next + 1);
  };
  rec(1);
  return best;
}

// Vertices of {A y >= b, y >= 0} by enumerating tight-constraint subsets.
// Exponential in n; callers keep n <= 7.
inline std::optional<double> lp_min_by_vertex_enumeration(
    const std::vector<std::vector<double>>& A, const std::vector<double>& b) {
  const int n = static_cast<int>(A.size());
  // constraint rows: n of A (>= b), n of identity (>= 0)
  auto row = [&](int idx, int j) { return idx < n ? A[idx][j] : (idx - n == j ? 1.0 : 0.0); };
  auto rhs = [&](int idx) { return idx < n ? b[idx] : 0.0; };

  std::optional<double> best;
  std::vector<int> subset;
  std::function<void(int)> rec = [&](int next) {
    if (static_cast<int>(subset.size()) == n) {
      // solve the n x n tight system
      std::vector<std::vector<double>> m(n, std::vector<double>(n + 1));
      for (int r = 0; r < n; ++r) {
        for (int j = 0; j < n; ++j) m[r][j] = row(subset[r], j);
        m[r][n] = rhs(subset[r]);
      }
      for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int r = col; r < n; ++r) {
          if (std::abs(m[r][col]) > 1e-9 && (piv < 0 || std::abs(m[r][col]) > std::abs(m[piv][col]))) {
            piv = r;
          }
        }
        if (piv < 0) return;  // singular, not a vertex
        std::swap(m[col], m[piv]);
        for (int r = 0; r < n; ++r) {
          if (r == col) continue;
          double f = m[r][col] / m[col][col];
          for (int j = col; j <= n; ++j) m[r][j] -= f * m[col][j];
        }
      }
      std::vector<double> y(n);
      for (int i = 0; i < n; ++i) y[i] = m[i][n] / m[i][i];
      // feasibility of the candidate vertex
      for (int i = 0; i < n; ++i) {
        if (y[i] < -1e-7) return;
      }
      for (int r = 0; r < n; ++r) {
        double lhs = 0;
        for (int j = 0; j < n; ++j) lhs += A[r][j] * y[j];
        if (lhs < b[r] - 1e-7) return;
      }
      double obj = 0;
      for (double v : y) obj += v;
      if (!best || obj < *best) best = obj;
      return;
    }
    if (next >= 2 * n) return;
    subset.push_back(next);
    rec(next + 1);
    subset.pop_back();
    if (2 * n - next - 1 >= n - static_cast<int>(subset.size())) rec(next + 1);
  };
  rec(0);
  return best;
}

}  // namespace oracle
