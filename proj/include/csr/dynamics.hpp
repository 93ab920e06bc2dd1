#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "csr/game.hpp"
#include "csr/rng.hpp"

namespace csr {

using BigInt = boost::multiprecision::cpp_int;

enum class SchedulerKind { lbr, min_index, seeded_random };

inline const char* scheduler_name(SchedulerKind s) {
  switch (s) {
    case SchedulerKind::lbr: return "lbr";
    case SchedulerKind::min_index: return "min-index";
    case SchedulerKind::seeded_random: return "random";
  }
  return "?";
}

inline SchedulerKind parse_scheduler(const std::string& name) {
  if (name == "lbr") return SchedulerKind::lbr;
  if (name == "min-index") return SchedulerKind::min_index;
  if (name == "random") return SchedulerKind::seeded_random;
  throw Error("unknown scheduler: " + name);
}

struct Scheduler {
  SchedulerKind kind = SchedulerKind::lbr;
  std::uint64_t seed = 0;  // read by seeded_random only
};

// Radius dropped to exactly the updater's new radius r'. Only finite starting
// radii belong here; a unique holder losing uniqueness lands in Decrease.
struct ExactDecrease {
  int agent = 0;
  int old_radius = 0;
};

struct Decrease {
  int agent = 0;
  Radius old_radius;
  Radius new_radius;
};

struct UpdateEvent {
  int t = 0;  // 1-based step number
  int agent = 0;
  int from_resource = 0;
  int to_resource = 0;
  int old_radius = 0;  // updaters are unsatisfied, hence finite
  Radius new_radius;
  // Sorted by (old_radius, agent).
  std::vector<ExactDecrease> decreased_exactly_to_rprime;
  // Every other strict radius decrease caused by this update.
  std::vector<Decrease> other_decreases;
  bool bad_case = false;
  RadiusVector rv_before, rv_after;
};

struct Trace {
  int n = 0;
  int k = 0;
  int diameter = 0;
  SchedulerKind scheduler = SchedulerKind::lbr;
  std::uint64_t seed = 0;
  AllocationProfile initial_profile;
  AllocationProfile final_profile;
  std::vector<UpdateEvent> events;
  bool terminated = false;  // false means the step budget ran out first
};

// Unsatisfied agents sorted by (radius, agent). Unbounded agents never appear.
inline std::vector<std::pair<int, Radius>> unsatisfied_set(const Game& game,
                                                           const AllocationProfile& p) {
  std::vector<std::pair<int, Radius>> out;
  for (int i = 1; i <= game.n(); ++i) {
    Radius r = radius_of(game, p, i);
    if (best_responses(game, p, i).achieved > r) out.emplace_back(i, r);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second < b.second;
    return a.first < b.first;
  });
  return out;
}

// True when some agent with a smaller radius than the updater was satisfied
// before the update and is unsatisfied after it.
inline bool detect_bad_case(const Game& game, const AllocationProfile& before,
                            const AllocationProfile& after, int updater, int updater_old_radius) {
  for (int l = 1; l <= game.n(); ++l) {
    if (l == updater) continue;
    Radius r = radius_of(game, before, l);
    if (r >= Radius::finite(updater_old_radius)) continue;
    if (!is_unsatisfied(game, before, l) && is_unsatisfied(game, after, l)) return true;
  }
  return false;
}

// Best-response engine. Keeps, per resource, each node's distance to the
// nearest other holder; after a move only the two touched resource columns
// are rebuilt.
class Simulator {
 public:
  Simulator(const Game& game, AllocationProfile initial)
      : game_(&game), profile_(std::move(initial)) {
    validate_profile(profile_, game.n(), game.k);
    const int n = game.n();
    holders_.assign(game.k + 1, {});
    for (int i = 1; i <= n; ++i) holders_[profile_.at(i)].push_back(i);
    rho_.assign(game.k + 1, std::vector<int>(n, Radius::kUnboundedKey));
    b1d_.assign(n, 0);
    b1j_.assign(n, 0);
    b2d_.assign(n, 0);
    for (int o = 1; o <= game.k; ++o) rebuild_column(o);
  }

  const AllocationProfile& profile() const { return profile_; }
  const Game& game() const { return *game_; }

  int radius_key(int node) const { return rho_[profile_.at(node)][node - 1]; }

  int best_key(int node) const {
    int best = 0;
    for (int o = 1; o <= game_->k; ++o) best = std::max(best, rho_[o][node - 1]);
    return best;
  }

  bool agent_unsatisfied(int node) const { return best_key(node) > radius_key(node); }

  bool is_equilibrium() const {
    for (int i = 1; i <= game_->n(); ++i) {
      if (agent_unsatisfied(i)) return false;
    }
    return true;
  }

  RadiusVector current_radius_vector() const {
    RadiusVector rv;
    rv.counts.assign(game_->diameter(), 0);
    for (int i = 1; i <= game_->n(); ++i) {
      int key = radius_key(i);
      if (key == Radius::kUnboundedKey) {
        ++rv.unbounded_count;
      } else {
        ++rv.counts[key - 1];
      }
    }
    return rv;
  }

  // Applies one update; nullopt at equilibrium. rng is read only by
  // seeded_random.
  std::optional<UpdateEvent> step(SchedulerKind kind, std::mt19937_64* rng) {
    const int n = game_->n();
    const int k = game_->k;

    std::vector<int> unsat;
    std::vector<char> satisfied_before(n + 1, 1);
    std::vector<int> old_radius(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
      old_radius[i] = radius_key(i);
      if (best_key(i) > old_radius[i]) {
        satisfied_before[i] = 0;
        unsat.push_back(i);
      }
    }
    if (unsat.empty()) return std::nullopt;

    int chosen = unsat.front();
    switch (kind) {
      case SchedulerKind::min_index:
        break;  // unsat is in ascending agent order already
      case SchedulerKind::lbr:
        for (int i : unsat) {
          if (old_radius[i] < old_radius[chosen]) chosen = i;
        }
        break;
      case SchedulerKind::seeded_random:
        chosen = unsat[rng_below(*rng, unsat.size())];
        break;
    }

    UpdateEvent ev;
    ev.t = ++steps_;
    ev.agent = chosen;
    ev.from_resource = profile_.at(chosen);
    ev.old_radius = old_radius[chosen];
    ev.rv_before = current_radius_vector();

    // Lowest-index resource among the maximizers.
    int best = 0, pick = 1;
    for (int o = 1; o <= k; ++o) {
      if (rho_[o][chosen - 1] > best) {
        best = rho_[o][chosen - 1];
        pick = o;
      }
    }
    ev.to_resource = pick;
    ev.new_radius = Radius{best};

    apply_move(chosen, ev.from_resource, ev.to_resource);

    ev.rv_after = current_radius_vector();
    for (int i = 1; i <= n; ++i) {
      if (i == chosen) continue;
      int now = radius_key(i);
      if (now >= old_radius[i]) continue;
      if (old_radius[i] != Radius::kUnboundedKey && now == ev.new_radius.key) {
        ev.decreased_exactly_to_rprime.push_back({i, old_radius[i]});
      } else {
        ev.other_decreases.push_back({i, Radius{old_radius[i]}, Radius{now}});
      }
      // A smaller-radius satisfied agent turning unsatisfied is checked below;
      // radius decreases never reach below r' so they cannot involve them.
    }
    std::sort(ev.decreased_exactly_to_rprime.begin(), ev.decreased_exactly_to_rprime.end(),
              [](const ExactDecrease& a, const ExactDecrease& b) {
                if (a.old_radius != b.old_radius) return a.old_radius < b.old_radius;
                return a.agent < b.agent;
              });

    ev.bad_case = false;
    for (int i = 1; i <= n; ++i) {
      if (i == chosen || !satisfied_before[i] || old_radius[i] >= ev.old_radius) continue;
      if (agent_unsatisfied(i)) {
        ev.bad_case = true;
        break;
      }
    }
    return ev;
  }

 private:
  void apply_move(int agent, int from, int to) {
    auto& ha = holders_[from];
    ha.erase(std::find(ha.begin(), ha.end(), agent));
    holders_[to].push_back(agent);
    profile_.set(agent, to);
    rebuild_column(from);
    rebuild_column(to);
  }

  // Two nearest distinct holders per node; rho falls out of whichever is not
  // the node itself.
  void rebuild_column(int o) {
    const int n = game_->n();
    std::fill(b1d_.begin(), b1d_.end(), Radius::kUnboundedKey);
    std::fill(b1j_.begin(), b1j_.end(), 0);
    std::fill(b2d_.begin(), b2d_.end(), Radius::kUnboundedKey);
    for (int j : holders_[o]) {
      for (int i = 1; i <= n; ++i) {
        int d = game_->dist.at(i, j);
        if (d < b1d_[i - 1]) {
          b2d_[i - 1] = b1d_[i - 1];
          b1d_[i - 1] = d;
          b1j_[i - 1] = j;
        } else if (d < b2d_[i - 1]) {
          b2d_[i - 1] = d;
        }
      }
    }
    auto& col = rho_[o];
    for (int i = 1; i <= n; ++i) col[i - 1] = (b1j_[i - 1] == i) ? b2d_[i - 1] : b1d_[i - 1];
  }

  const Game* game_;
  AllocationProfile profile_;
  std::vector<std::vector<int>> holders_;  // holders_[resource]
  std::vector<std::vector<int>> rho_;      // rho_[resource][node-1]
  std::vector<int> b1d_, b1j_, b2d_;       // column rebuild scratch
  int steps_ = 0;
};

// Reference single step, recomputed from scratch with the pure game ops.
// Mirrors Simulator::step exactly; kept separate so the two can be checked
// against each other.
inline std::optional<std::pair<UpdateEvent, AllocationProfile>> step(
    const Game& game, const AllocationProfile& p, SchedulerKind kind,
    std::mt19937_64* rng = nullptr) {
  auto unsat = unsatisfied_set(game, p);
  if (unsat.empty()) return std::nullopt;

  int chosen = 0;
  switch (kind) {
    case SchedulerKind::lbr:
      chosen = unsat.front().first;  // already sorted by (radius, agent)
      break;
    case SchedulerKind::min_index: {
      chosen = unsat.front().first;
      for (const auto& [agent, radius] : unsat) chosen = std::min(chosen, agent);
      break;
    }
    case SchedulerKind::seeded_random: {
      std::vector<int> agents;
      for (const auto& [agent, radius] : unsat) agents.push_back(agent);
      std::sort(agents.begin(), agents.end());
      chosen = agents[rng_below(*rng, agents.size())];
      break;
    }
  }

  UpdateEvent ev;
  ev.agent = chosen;
  ev.from_resource = p.at(chosen);
  ev.old_radius = radius_of(game, p, chosen).value();
  ev.rv_before = radius_vector(game, p);

  BestResponse br = best_responses(game, p, chosen);
  ev.to_resource = br.canonical();
  ev.new_radius = br.achieved;

  AllocationProfile next = p;
  next.set(chosen, ev.to_resource);
  ev.rv_after = radius_vector(game, next);

  for (int i = 1; i <= game.n(); ++i) {
    if (i == chosen) continue;
    Radius before = radius_of(game, p, i);
    Radius after = radius_of(game, next, i);
    if (after >= before) continue;
    if (before.is_finite() && after == ev.new_radius) {
      ev.decreased_exactly_to_rprime.push_back({i, before.value()});
    } else {
      ev.other_decreases.push_back({i, before, after});
    }
  }
  std::sort(ev.decreased_exactly_to_rprime.begin(), ev.decreased_exactly_to_rprime.end(),
            [](const ExactDecrease& a, const ExactDecrease& b) {
              if (a.old_radius != b.old_radius) return a.old_radius < b.old_radius;
              return a.agent < b.agent;
            });
  ev.bad_case = detect_bad_case(game, p, next, chosen, ev.old_radius);
  return std::make_pair(std::move(ev), std::move(next));
}

// Default budget: comfortably above every proven bound at desk scale.
inline long long default_max_steps(const Game& game) {
  long long n = game.n();
  long long md = std::min<long long>(game.k - 1, game.diameter());
  return 3 * n * n * n * std::max<long long>(md, 0) + n;
}

inline Trace run_dynamics(const Game& game, AllocationProfile initial, Scheduler scheduler,
                          long long max_steps) {
  Trace trace;
  trace.n = game.n();
  trace.k = game.k;
  trace.diameter = game.diameter();
  trace.scheduler = scheduler.kind;
  trace.seed = scheduler.seed;
  trace.initial_profile = initial;

  Simulator sim(game, std::move(initial));
  std::mt19937_64 rng(scheduler.seed);
  for (long long t = 0; t < max_steps; ++t) {
    auto ev = sim.step(scheduler.kind, &rng);
    if (!ev) {
      trace.terminated = true;
      break;
    }
    trace.events.push_back(std::move(*ev));
  }
  if (!trace.terminated) trace.terminated = sim.is_equilibrium();
  trace.final_profile = sim.profile();
  return trace;
}

inline AllocationProfile replay(const Trace& trace) {
  AllocationProfile p = trace.initial_profile;
  for (const UpdateEvent& ev : trace.events) p.set(ev.agent, ev.to_resource);
  return p;
}

// --- per-event / per-trace checkers ----------------------------------------

// Counts below the updater's old radius r are untouched and n_r drops.
inline bool check_lemma1(const UpdateEvent& ev) {
  const int r = ev.old_radius;
  for (int j = 1; j < r; ++j) {
    if (ev.rv_before.counts[j - 1] != ev.rv_after.counts[j - 1]) return false;
  }
  return ev.rv_after.counts[r - 1] <= ev.rv_before.counts[r - 1] - 1;
}

// r' + r_1 + ... + r_s <= 2n and (s+1)(r+2) <= 2n for the agents whose radius
// dropped exactly to r'. Vacuous when r' is unbounded or nobody dropped to it.
inline bool check_lemma2(const UpdateEvent& ev, int n) {
  if (!ev.new_radius.is_finite() || ev.decreased_exactly_to_rprime.empty()) return true;
  long long sum = ev.new_radius.value();
  for (const ExactDecrease& d : ev.decreased_exactly_to_rprime) sum += d.old_radius;
  if (sum > 2LL * n) return false;
  long long s = static_cast<long long>(ev.decreased_exactly_to_rprime.size());
  return (s + 1) * (ev.old_radius + 2) <= 2LL * n;
}

// Update radii stay below the resource count under least best response.
// Scope-guarded: other schedulers pass vacuously.
inline bool check_lemma3(const Trace& trace) {
  if (trace.scheduler != SchedulerKind::lbr) return true;
  for (const UpdateEvent& ev : trace.events) {
    if (ev.old_radius > trace.k - 1) return false;
  }
  return true;
}

struct PotentialSumResult {
  double sum = 0.0;
  bool ok = true;  // sum < 3
};

inline PotentialSumResult check_theorem3(const Trace& trace) {
  PotentialSumResult res;
  const double n = trace.n;
  for (const UpdateEvent& ev : trace.events) res.sum += std::pow(1.0 / n, ev.old_radius);
  res.ok = res.sum < 3.0;
  return res;
}

// No radius decrease caused by an update lands below the updater's new radius.
inline bool check_threshold(const UpdateEvent& ev) {
  for (const Decrease& d : ev.other_decreases) {
    if (d.new_radius < ev.new_radius) return false;
  }
  return true;  // the exact-decrease list lands at r' by construction
}

inline Radius min_radius(const RadiusVector& rv) {
  for (std::size_t i = 0; i < rv.counts.size(); ++i) {
    if (rv.counts[i] > 0) return Radius::finite(static_cast<int>(i) + 1);
  }
  return Radius::unbounded();
}

// The smallest ball never shrinks along a best-response trace.
inline bool check_min_radius_monotone(const Trace& trace) {
  for (const UpdateEvent& ev : trace.events) {
    if (min_radius(ev.rv_after) < min_radius(ev.rv_before)) return false;
  }
  return true;
}

inline BigInt binomial(long long a, long long b) {
  if (b < 0 || b > a) return 0;
  b = std::min(b, a - b);
  BigInt result = 1;
  for (long long i = 1; i <= b; ++i) {
    result *= (a - b + i);
    result /= i;  // exact: product of i consecutive integers divides by i!
  }
  return result;
}

struct BoundReport {
  long long T = 0;
  long long bound_thm4 = 0;   // n * min(k-1, D)
  long long bound_thm5 = 0;   // 3 n^3 * min(k-1, D)
  BigInt bound_cor = 0;       // 3 n^(k-1), least-best-response radius bound
  BigInt bound_naive = 0;     // C(n+D-1, D-1), distinct radius histograms
  double potential_sum = 0.0;
  int max_update_radius = 0;
  long long bad_case_count = 0;
  bool terminated = false;
  bool thm4_applicable = false, thm4_ok = true;
  bool thm5_applicable = false, thm5_ok = true;
  bool cor_applicable = false, cor_ok = true;
};

inline BoundReport bound_report(const Game& game, const Trace& trace) {
  BoundReport rep;
  const long long n = trace.n;
  const long long md = std::max<long long>(0, std::min<long long>(trace.k - 1, trace.diameter));
  rep.T = static_cast<long long>(trace.events.size());
  rep.bound_thm4 = n * md;
  rep.bound_thm5 = 3 * n * n * n * md;
  rep.bound_cor = 3 * boost::multiprecision::pow(BigInt(n), static_cast<unsigned>(trace.k - 1));
  rep.bound_naive = binomial(n + trace.diameter - 1, trace.diameter - 1);
  rep.terminated = trace.terminated;
  auto pot = check_theorem3(trace);
  rep.potential_sum = pot.sum;
  for (const UpdateEvent& ev : trace.events) {
    rep.max_update_radius = std::max(rep.max_update_radius, ev.old_radius);
    if (ev.bad_case) ++rep.bad_case_count;
  }
  const bool lbr = trace.scheduler == SchedulerKind::lbr;
  rep.thm4_applicable = lbr && trace.k < 5;
  rep.thm4_ok = !rep.thm4_applicable || rep.T <= rep.bound_thm4;
  rep.thm5_applicable = lbr && game.graph.min_degree() >= trace.k;
  rep.thm5_ok = !rep.thm5_applicable || rep.T <= rep.bound_thm5;
  rep.cor_applicable = lbr;
  rep.cor_ok = !rep.cor_applicable || BigInt(rep.T) <= rep.bound_cor;
  return rep;
}

}  // namespace csr
