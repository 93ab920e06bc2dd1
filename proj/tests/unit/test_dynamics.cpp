#include <doctest.h>

#include <random>
#include <set>
#include <utility>
#include <vector>

#include "csr/dynamics.hpp"
#include "csr/game.hpp"
#include "csr/graph.hpp"
#include "oracles.hpp"

using csr::AllocationProfile;
using csr::Game;
using csr::GraphKind;
using csr::Radius;
using csr::Scheduler;
using csr::SchedulerKind;
using csr::Trace;
using csr::UpdateEvent;

namespace {

struct Instance {
  Game game;
  int k;
};

std::vector<Instance> dynamics_corpus() {
  std::vector<Instance> out;
  std::vector<csr::Graph> graphs;
  graphs.push_back(csr::generate(GraphKind::path, 6));
  graphs.push_back(csr::generate(GraphKind::cycle, 7));
  graphs.push_back(csr::generate(GraphKind::star, 7));
  graphs.push_back(csr::generate(GraphKind::grid, 9));
  graphs.push_back(csr::generate(GraphKind::complete, 6));
  graphs.push_back(csr::generate(GraphKind::random_tree, 10, 0.0, 3));
  graphs.push_back(csr::generate(GraphKind::erdos_renyi, 12, 0.4, 9));
  for (const auto& g : graphs) {
    for (int k : {2, 3, 5}) out.push_back({Game(g, k), k});
  }
  return out;
}

AllocationProfile random_profile(int n, int k, std::mt19937_64& rng) {
  std::vector<int> v(n);
  for (int& x : v) x = 1 + static_cast<int>(csr::rng_below(rng, k));
  return AllocationProfile(std::move(v));
}

void check_events_equal(const UpdateEvent& a, const UpdateEvent& b) {
  CHECK(a.agent == b.agent);
  CHECK(a.from_resource == b.from_resource);
  CHECK(a.to_resource == b.to_resource);
  CHECK(a.old_radius == b.old_radius);
  CHECK(a.new_radius == b.new_radius);
  CHECK(a.bad_case == b.bad_case);
  CHECK(a.rv_before == b.rv_before);
  CHECK(a.rv_after == b.rv_after);
  REQUIRE(a.decreased_exactly_to_rprime.size() == b.decreased_exactly_to_rprime.size());
  for (std::size_t i = 0; i < a.decreased_exactly_to_rprime.size(); ++i) {
    CHECK(a.decreased_exactly_to_rprime[i].agent == b.decreased_exactly_to_rprime[i].agent);
    CHECK(a.decreased_exactly_to_rprime[i].old_radius == b.decreased_exactly_to_rprime[i].old_radius);
  }
  REQUIRE(a.other_decreases.size() == b.other_decreases.size());
  for (std::size_t i = 0; i < a.other_decreases.size(); ++i) {
    CHECK(a.other_decreases[i].agent == b.other_decreases[i].agent);
    CHECK(a.other_decreases[i].old_radius == b.other_decreases[i].old_radius);
    CHECK(a.other_decreases[i].new_radius == b.other_decreases[i].new_radius);
  }
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("scheduler names round-trip") {
  for (SchedulerKind s :
       {SchedulerKind::lbr, SchedulerKind::min_index, SchedulerKind::seeded_random}) {
    CHECK(csr::parse_scheduler(csr::scheduler_name(s)) == s);
  }
  CHECK_THROWS_AS(csr::parse_scheduler("round-robin"), csr::Error);
}

TEST_CASE("unsatisfied_set orders by radius then index") {
  Game k3(csr::generate(GraphKind::complete, 3), 2);
  CHECK(csr::unsatisfied_set(k3, AllocationProfile({1, 2, 1})).empty());

  auto all = csr::unsatisfied_set(k3, AllocationProfile({1, 1, 1}));
  REQUIRE(all.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(all[i].first == i + 1);
    CHECK(all[i].second == Radius::finite(1));
  }

  // The middle node already attains the best achievable radius, so only the
  // endpoint wants to move.
  Game p3(csr::generate(GraphKind::path, 3), 2);
  auto us = csr::unsatisfied_set(p3, AllocationProfile({1, 1, 2}));
  REQUIRE(us.size() == 1);
  CHECK(us[0] == std::pair{1, Radius::finite(1)});

  Game c6(csr::generate(GraphKind::cycle, 6), 3);
  auto uc = csr::unsatisfied_set(c6, AllocationProfile({1, 1, 2, 1, 1, 2}));
  REQUIRE(uc.size() == 6);
  CHECK(uc[0] == std::pair{1, Radius::finite(1)});
  CHECK(uc[1] == std::pair{2, Radius::finite(1)});
  CHECK(uc[2] == std::pair{4, Radius::finite(1)});
  CHECK(uc[3] == std::pair{5, Radius::finite(1)});
  CHECK(uc[4] == std::pair{3, Radius::finite(3)});
  CHECK(uc[5] == std::pair{6, Radius::finite(3)});
}

TEST_CASE("single step on named instances") {
  Game k3(csr::generate(GraphKind::complete, 3), 2);
  auto s = csr::step(k3, AllocationProfile({1, 1, 1}), SchedulerKind::lbr);
  REQUIRE(s.has_value());
  CHECK(s->first.agent == 1);
  CHECK(s->first.from_resource == 1);
  CHECK(s->first.to_resource == 2);
  CHECK(s->first.old_radius == 1);
  CHECK(s->first.new_radius == Radius::unbounded());
  CHECK(s->second == AllocationProfile({2, 1, 1}));

  CHECK_FALSE(csr::step(k3, AllocationProfile({1, 2, 1}), SchedulerKind::lbr).has_value());

  Game p3(csr::generate(GraphKind::path, 3), 2);
  auto sp = csr::step(p3, AllocationProfile({1, 1, 1}), SchedulerKind::lbr);
  REQUIRE(sp.has_value());
  CHECK(sp->first.agent == 1);
  CHECK(sp->first.to_resource == 2);
}

TEST_CASE("triangle with three resources converges in two steps") {
  Game g(csr::generate(GraphKind::complete, 3), 3);
  Trace tr = csr::run_dynamics(g, AllocationProfile(3, 1), Scheduler{SchedulerKind::lbr, 0},
                               csr::default_max_steps(g));
  CHECK(tr.terminated);
  REQUIRE(tr.events.size() == 2);
  CHECK(tr.final_profile == AllocationProfile({2, 3, 1}));

  const auto& e1 = tr.events[0];
  CHECK(e1.t == 1);
  CHECK(e1.agent == 1);
  CHECK(e1.from_resource == 1);
  CHECK(e1.to_resource == 2);
  CHECK(e1.old_radius == 1);
  CHECK(e1.new_radius == Radius::unbounded());
  CHECK(e1.decreased_exactly_to_rprime.empty());
  CHECK(e1.other_decreases.empty());
  CHECK(e1.rv_before == csr::RadiusVector{{3}, 0});
  CHECK(e1.rv_after == csr::RadiusVector{{2}, 1});

  const auto& e2 = tr.events[1];
  CHECK(e2.t == 2);
  CHECK(e2.agent == 2);
  CHECK(e2.from_resource == 1);
  CHECK(e2.to_resource == 3);
  CHECK(e2.rv_after == csr::RadiusVector{{0}, 3});
}

TEST_CASE("incremental simulator agrees with the from-scratch step") {
  std::mt19937_64 seeder(4242);
  for (const auto& [game, k] : dynamics_corpus()) {
    for (SchedulerKind kind :
         {SchedulerKind::lbr, SchedulerKind::min_index, SchedulerKind::seeded_random}) {
      AllocationProfile p = random_profile(game.n(), k, seeder);
      csr::Simulator sim(game, p);
      std::mt19937_64 rng_a(7), rng_b(7);
      for (int t = 0; t < 200; ++t) {
        auto fast = sim.step(kind, &rng_a);
        auto slow = csr::step(game, p, kind, &rng_b);
        REQUIRE(fast.has_value() == slow.has_value());
        if (!fast) break;
        check_events_equal(*fast, slow->first);
        p = slow->second;
        CHECK(sim.profile() == p);
      }
    }
  }
}

TEST_CASE("dynamics terminate at an equilibrium and every event passes the checkers") {
  std::mt19937_64 seeder(20240601);
  for (const auto& [game, k] : dynamics_corpus()) {
    for (SchedulerKind kind :
         {SchedulerKind::lbr, SchedulerKind::min_index, SchedulerKind::seeded_random}) {
      for (int init = 0; init < 2; ++init) {
        AllocationProfile p0 =
            init == 0 ? AllocationProfile(game.n(), 1) : random_profile(game.n(), k, seeder);
        Trace tr = csr::run_dynamics(game, p0, Scheduler{kind, 11}, csr::default_max_steps(game));
        CHECK(tr.terminated);
        CHECK(csr::is_equilibrium(game, tr.final_profile));
        CHECK(oracle::is_equilibrium(game.graph, tr.final_profile, k));
        CHECK(csr::replay(tr) == tr.final_profile);
        CHECK(csr::check_lemma3(tr));
        CHECK(csr::check_min_radius_monotone(tr));
        CHECK(csr::check_theorem3(tr).ok);

        for (const UpdateEvent& ev : tr.events) {
          CHECK(ev.from_resource != ev.to_resource);
          CHECK(ev.new_radius > Radius::finite(ev.old_radius));
          CHECK(csr::check_lemma1(ev));
          CHECK(csr::check_lemma2(ev, game.n()));
          CHECK(csr::check_threshold(ev));
          CHECK(csr::lex_compare(ev.rv_after, ev.rv_before) == std::strong_ordering::less);
          if (k <= 4) CHECK_FALSE(ev.bad_case);

          int total = ev.rv_after.unbounded_count;
          for (int c : ev.rv_after.counts) total += c;
          CHECK(total == game.n());
        }
      }
    }
  }
}

TEST_CASE("random scheduler is reproducible per seed") {
  Game g(csr::generate(GraphKind::cycle, 9), 3);
  AllocationProfile p0(9, 1);
  auto agents_of = [](const Trace& tr) {
    std::vector<int> a;
    for (const auto& ev : tr.events) a.push_back(ev.agent);
    return a;
  };
  Trace a = csr::run_dynamics(g, p0, Scheduler{SchedulerKind::seeded_random, 7}, 10000);
  Trace b = csr::run_dynamics(g, p0, Scheduler{SchedulerKind::seeded_random, 7}, 10000);
  CHECK(agents_of(a) == agents_of(b));
  CHECK(a.final_profile == b.final_profile);

  std::set<std::vector<int>> distinct;
  for (std::uint64_t s = 0; s < 5; ++s) {
    distinct.insert(
        agents_of(csr::run_dynamics(g, p0, Scheduler{SchedulerKind::seeded_random, s}, 10000)));
  }
  CHECK(distinct.size() >= 2);
}

TEST_CASE("dynamics respect the step budget") {
  Game g(csr::generate(GraphKind::cycle, 8), 4);
  Trace tr = csr::run_dynamics(g, AllocationProfile(8, 1), Scheduler{SchedulerKind::lbr, 0}, 1);
  CHECK(tr.events.size() == 1);
  // With budget 1 on a non-equilibrium start the run must report exhaustion
  // unless one move finished the job.
  if (!csr::is_equilibrium(g, tr.final_profile)) CHECK_FALSE(tr.terminated);
}

TEST_CASE("per-event checker rejections on synthetic events") {
  UpdateEvent ev;
  ev.old_radius = 2;
  ev.new_radius = Radius::finite(2);
  ev.rv_before = csr::RadiusVector{{1, 2, 0}, 0};
  ev.rv_after = csr::RadiusVector{{1, 1, 1}, 0};
  CHECK(csr::check_lemma1(ev));

  ev.rv_after = csr::RadiusVector{{0, 2, 1}, 0};  // count below r changed
  CHECK_FALSE(csr::check_lemma1(ev));
  ev.rv_after = csr::RadiusVector{{1, 2, 0}, 0};  // n_r did not drop
  CHECK_FALSE(csr::check_lemma1(ev));

  UpdateEvent lm2;
  lm2.old_radius = 2;
  lm2.new_radius = Radius::finite(2);
  lm2.decreased_exactly_to_rprime = {{5, 3}, {6, 3}};
  CHECK_FALSE(csr::check_lemma2(lm2, 3));  // 2+3+3 > 6
  CHECK(csr::check_lemma2(lm2, 10));
  lm2.decreased_exactly_to_rprime.clear();
  CHECK(csr::check_lemma2(lm2, 3));  // vacuous: nobody dropped to r'
  lm2.new_radius = Radius::unbounded();
  lm2.decreased_exactly_to_rprime = {{5, 3}};
  CHECK(csr::check_lemma2(lm2, 3));  // vacuous: unbounded r'

  UpdateEvent th;
  th.new_radius = Radius::finite(3);
  th.other_decreases = {{4, Radius::finite(5), Radius::finite(2)}};
  CHECK_FALSE(csr::check_threshold(th));
  th.other_decreases = {{4, Radius::finite(5), Radius::finite(3)}};
  CHECK(csr::check_threshold(th));
}

TEST_CASE("per-trace checker rejections on synthetic traces") {
  Trace tr;
  tr.n = 2;
  tr.k = 3;
  tr.scheduler = SchedulerKind::lbr;
  for (int i = 0; i < 6; ++i) {
    UpdateEvent ev;
    ev.old_radius = 1;
    tr.events.push_back(ev);
  }
  auto pot = csr::check_theorem3(tr);  // 6 * (1/2) = 3, not < 3
  CHECK(pot.sum == doctest::Approx(3.0));
  CHECK_FALSE(pot.ok);

  tr.events[0].old_radius = 3;  // above k-1
  CHECK_FALSE(csr::check_lemma3(tr));
  tr.scheduler = SchedulerKind::min_index;
  CHECK(csr::check_lemma3(tr));

  Trace mono;
  mono.n = 4;
  UpdateEvent ev;
  ev.rv_before = csr::RadiusVector{{0, 2, 2}, 0};
  ev.rv_after = csr::RadiusVector{{1, 1, 2}, 0};
  mono.events.push_back(ev);
  CHECK_FALSE(csr::check_min_radius_monotone(mono));
}

TEST_CASE("min_radius reads the first occupied bucket") {
  CHECK(csr::min_radius(csr::RadiusVector{{0, 2, 1}, 0}) == Radius::finite(2));
  CHECK(csr::min_radius(csr::RadiusVector{{0, 0, 0}, 3}) == Radius::unbounded());
}

TEST_CASE("binomial coefficients are exact") {
  CHECK(csr::binomial(5, 2) == 10);
  CHECK(csr::binomial(10, 0) == 1);
  CHECK(csr::binomial(4, 7) == 0);
  CHECK(csr::binomial(20, 10) == 184756);
  CHECK(csr::binomial(100, 50) == csr::BigInt("100891344545564193334812497256"));
}

TEST_CASE("default step budget formula") {
  Game g(csr::generate(GraphKind::cycle, 5), 3);  // n=5, D=2, k=3
  CHECK(csr::default_max_steps(g) == 3LL * 125 * 2 + 5);
}

TEST_CASE("bound report fields on a frozen trace") {
  Game g(csr::generate(GraphKind::complete, 3), 3);
  Trace tr = csr::run_dynamics(g, AllocationProfile(3, 1), Scheduler{SchedulerKind::lbr, 0},
                               csr::default_max_steps(g));
  auto rep = csr::bound_report(g, tr);
  CHECK(rep.T == 2);
  CHECK(rep.bound_thm4 == 3);       // n * min(k-1, D) = 3 * 1
  CHECK(rep.bound_thm5 == 81);      // 3 n^3 * min(k-1, D)
  CHECK(rep.bound_cor == 27);       // 3 * 3^2
  CHECK(rep.bound_naive == 1);      // C(3, 0)
  CHECK(rep.max_update_radius == 1);
  CHECK(rep.bad_case_count == 0);
  CHECK(rep.terminated);
  CHECK(rep.thm4_applicable);
  CHECK(rep.thm4_ok);
  CHECK_FALSE(rep.thm5_applicable);  // min degree 2 < k = 3
  CHECK(rep.cor_applicable);
  CHECK(rep.cor_ok);
  CHECK(rep.potential_sum == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("bad case fires on a sparse cycle with many resources") {
  // Twelve-cycle, six resources: the sixth update turns a previously satisfied
  // smaller-radius agent unsatisfied. Minimum degree 2 < k keeps this outside
  // the dense regime, so a radius-4 bad update is legitimate here.
  Game g(csr::generate(GraphKind::cycle, 12), 6);
  AllocationProfile init({5, 3, 2, 5, 6, 5, 5, 6, 2, 3, 3, 6});
  Trace tr = csr::run_dynamics(g, init, Scheduler{SchedulerKind::lbr, 0},
                               csr::default_max_steps(g));
  REQUIRE(tr.terminated);
  CHECK(tr.events.size() == 7);
  auto rep = csr::bound_report(g, tr);
  CHECK(rep.bad_case_count == 1);
  const UpdateEvent& bad = tr.events[5];
  CHECK(bad.bad_case);
  CHECK(bad.t == 6);
  CHECK(bad.agent == 2);
  CHECK(bad.from_resource == 4);
  CHECK(bad.to_resource == 5);
  CHECK(bad.old_radius == 4);
  // The detector matches the from-scratch definition on this event.
  AllocationProfile before = tr.initial_profile;
  for (int e = 0; e < 5; ++e) before.set(tr.events[e].agent, tr.events[e].to_resource);
  AllocationProfile after = before;
  after.set(bad.agent, bad.to_resource);
  CHECK(csr::detect_bad_case(g, before, after, bad.agent, bad.old_radius));
  for (const UpdateEvent& ev : tr.events) {
    if (!ev.bad_case) {
      AllocationProfile b2 = tr.initial_profile;
      for (const UpdateEvent& prior : tr.events) {
        if (prior.t >= ev.t) break;
        b2.set(prior.agent, prior.to_resource);
      }
      AllocationProfile a2 = b2;
      a2.set(ev.agent, ev.to_resource);
      CHECK_FALSE(csr::detect_bad_case(g, b2, a2, ev.agent, ev.old_radius));
    }
  }
}

TEST_CASE("bound report applicability gates") {
  Game g(csr::generate(GraphKind::cycle, 6), 5);  // min degree 2 < k
  Trace tr = csr::run_dynamics(g, AllocationProfile(6, 1), Scheduler{SchedulerKind::min_index, 0},
                               csr::default_max_steps(g));
  auto rep = csr::bound_report(g, tr);
  CHECK_FALSE(rep.thm4_applicable);  // not lbr
  CHECK_FALSE(rep.thm5_applicable);
  CHECK_FALSE(rep.cor_applicable);
  CHECK(rep.thm4_ok);
  CHECK(rep.thm5_ok);
  CHECK(rep.cor_ok);

  Game h(csr::generate(GraphKind::complete, 4), 2);  // min degree 3 >= k
  Trace th = csr::run_dynamics(h, AllocationProfile(4, 1), Scheduler{SchedulerKind::lbr, 0},
                               csr::default_max_steps(h));
  auto rh = csr::bound_report(h, th);
  CHECK(rh.thm4_applicable);
  CHECK(rh.thm5_applicable);
  CHECK(rh.cor_applicable);
  CHECK(rh.thm4_ok);
  CHECK(rh.thm5_ok);
  CHECK(rh.cor_ok);
}

}  // TEST_SUITE
