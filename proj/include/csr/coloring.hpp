#pragma once

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <vector>

#include "csr/dynamics.hpp"
#include "csr/game.hpp"
#include "csr/rng.hpp"

namespace csr {

// A coloring is just an allocation profile read as node -> color.
inline bool is_proper(const Graph& g, const AllocationProfile& coloring) {
  for (auto [u, v] : g.edges) {
    if (coloring.at(u) == coloring.at(v)) return false;
  }
  return true;
}

// Deterministic backtracking k-coloring: vertices in descending-degree order
// (ties by index), colors tried ascending with new colors introduced in
// first-use order, forward checking on the remaining palette. Exact; bounded
// to n <= 40 because the worst case is exponential.
inline std::optional<AllocationProfile> k_colorable(const Graph& g, int k) {
  constexpr int kMaxNodes = 40;
  if (g.n > kMaxNodes) {
    throw SizeLimitError("k_colorable limited to n <= " + std::to_string(kMaxNodes) +
                         ", got n=" + std::to_string(g.n));
  }
  if (k < 1) throw Error("k_colorable needs k >= 1");

  const int n = g.n;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 1);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (g.degree(a) != g.degree(b)) return g.degree(a) > g.degree(b);
    return a < b;
  });

  std::vector<int> color(n + 1, 0);
  // forbidden[v][c-1] counts colored neighbors of v with color c
  std::vector<std::vector<int>> forbidden(n + 1, std::vector<int>(k, 0));

  std::function<bool(int, int)> assign = [&](int idx, int used) -> bool {
    if (idx == n) return true;
    int v = order[idx];
    // trying a color beyond the first unused one only renames color classes
    int limit = std::min(k, used + 1);
    for (int c = 1; c <= limit; ++c) {
      if (forbidden[v][c - 1] > 0) continue;
      color[v] = c;
      bool dead = false;
      for (int w : g.neighbors(v)) {
        if (color[w] == 0) {
          ++forbidden[w][c - 1];
          // forward check: an uncolored node with a fully forbidden palette
          // kills the branch
          int open = 0;
          for (int cc = 0; cc < k; ++cc) {
            if (forbidden[w][cc] == 0) ++open;
          }
          if (open == 0) dead = true;
        }
      }
      if (!dead && assign(idx + 1, std::max(used, c))) return true;
      // backtracking restores colors on unwind, so the uncolored set matches
      // the one seen on the way in
      for (int w : g.neighbors(v)) {
        if (color[w] == 0) --forbidden[w][c - 1];
      }
      color[v] = 0;
    }
    return false;
  };

  if (!assign(0, 0)) return std::nullopt;
  return AllocationProfile(std::vector<int>(color.begin() + 1, color.end()));
}

// r*_i = radius_i - 1; unique holders contribute the diameter. r* is the
// minimum over agents.
inline int equilibrium_r_star(const Game& game, const AllocationProfile& p) {
  int r_star = game.diameter();
  for (int i = 1; i <= game.n(); ++i) {
    Radius r = radius_of(game, p, i);
    int ri = r.is_unbounded() ? game.diameter() : r.value() - 1;
    r_star = std::min(r_star, ri);
  }
  return r_star;
}

// True when only unbounded agents attain the minimum, i.e. nobody has a
// finite radius (a finite radius is <= D, so it always undercuts D).
inline bool r_star_all_unbounded(const Game& game, const AllocationProfile& p) {
  for (int i = 1; i <= game.n(); ++i) {
    if (radius_of(game, p, i).is_finite()) return false;
  }
  return true;
}

struct ColoringReport {
  std::optional<int> h;                      // largest power with a k-coloring
  std::optional<AllocationProfile> witness;  // coloring of G^(h)
  int r_star = 0;
  bool matched = false;
  bool r_star_from_unbounded = false;  // r* determined solely by unique holders
  bool final_proper_for_h = false;     // final profile still properly colors G^(h)
  AllocationProfile final_profile;
  bool terminated = false;
};

// Largest h in 1..D with G^(h) k-colorable, then least best response seeded
// from that coloring. Colorability of powers is monotone non-increasing in h,
// so a binary search is sound; the linear scan stays for small diameters.
inline ColoringReport check_proposition1(const Game& game) {
  ColoringReport report;
  const int d = game.diameter();

  auto colorable_at = [&](int h) { return k_colorable(graph_power(game.graph, game.dist, h), game.k); };

  std::optional<AllocationProfile> witness;
  int h_found = 0;
  if (d >= 1) {
    if (d <= 8) {
      for (int h = 1; h <= d; ++h) {
        auto c = colorable_at(h);
        if (!c) break;
        witness = std::move(c);
        h_found = h;
      }
    } else {
      auto first = colorable_at(1);
      if (first) {
        witness = std::move(first);
        h_found = 1;
        int lo = 1, hi = d;  // invariant: lo colorable, above hi not
        while (lo < hi) {
          int mid = lo + (hi - lo + 1) / 2;
          auto c = colorable_at(mid);
          if (c) {
            witness = std::move(c);
            lo = mid;
          } else {
            hi = mid - 1;
          }
        }
        h_found = lo;
      }
    }
  }
  if (!witness) return report;  // not even G^(1) is k-colorable

  report.h = h_found;
  report.witness = witness;

  Trace trace = run_dynamics(game, *witness, {SchedulerKind::lbr, 0}, default_max_steps(game));
  report.terminated = trace.terminated;
  report.final_profile = trace.final_profile;
  report.r_star = equilibrium_r_star(game, trace.final_profile);
  report.r_star_from_unbounded = r_star_all_unbounded(game, trace.final_profile);
  report.final_proper_for_h =
      is_proper(graph_power(game.graph, game.dist, h_found), trace.final_profile);
  report.matched = trace.terminated && report.r_star == h_found;
  return report;
}

// Seeds least best response from a proper k-coloring of g itself (color
// classes permuted by seed) and checks the result is still a proper coloring
// and an equilibrium. Vacuously true when g is not k-colorable.
inline bool check_coloring_extension(const Game& game, std::uint64_t seed) {
  auto coloring = k_colorable(game.graph, game.k);
  if (!coloring) return true;

  std::mt19937_64 rng(seed);
  std::vector<int> perm(game.k);
  std::iota(perm.begin(), perm.end(), 1);
  for (int i = game.k - 1; i > 0; --i) {
    std::swap(perm[i], perm[rng_below(rng, i + 1)]);
  }
  AllocationProfile seeded = *coloring;
  for (int v = 1; v <= game.n(); ++v) seeded.set(v, perm[coloring->at(v) - 1]);

  Trace trace = run_dynamics(game, seeded, {SchedulerKind::lbr, seed}, default_max_steps(game));
  if (!trace.terminated) return false;
  return is_proper(game.graph, trace.final_profile) && is_equilibrium(game, trace.final_profile);
}

}  // namespace csr
