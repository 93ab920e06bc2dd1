#include <doctest.h>

#include <vector>

#include "csr/tree.hpp"
#include "oracles.hpp"

using csr::AllocationProfile;
using csr::Game;
using csr::GraphKind;

TEST_SUITE("tree") {

TEST_CASE("tree_order visits by level, ties by index") {
  Game g(csr::generate(GraphKind::path, 5), 2);
  auto order = csr::tree_order(g, 3);
  CHECK(order.root == 3);
  CHECK(order.levels == std::vector<int>{2, 1, 0, 1, 2});
  CHECK(order.visit_order == std::vector<int>{3, 2, 4, 1, 5});
  CHECK_THROWS_AS(csr::tree_order(g, 6), csr::LabelOutOfRangeError);
  CHECK_THROWS_AS(csr::tree_order(g, 0), csr::LabelOutOfRangeError);
}

TEST_CASE("solve_tree rejects non-trees") {
  Game cyc(csr::generate(GraphKind::cycle, 5), 2);
  CHECK_THROWS_AS(csr::solve_tree(cyc, 1), csr::NotATreeError);
}

TEST_CASE("solve_tree on tiny named trees") {
  Game edge(csr::generate(GraphKind::path, 2), 2);
  CHECK(csr::solve_tree(edge, 1).profile == AllocationProfile({1, 2}));
  CHECK(csr::solve_tree(edge, 2).profile == AllocationProfile({2, 1}));

  Game star(csr::generate(GraphKind::star, 4), 2);
  CHECK(csr::solve_tree(star, 1).profile == AllocationProfile({1, 2, 2, 2}));

  Game p4(csr::generate(GraphKind::path, 4), 2);
  CHECK(csr::solve_tree(p4, 1).profile == AllocationProfile({1, 2, 1, 2}));
  Game p4k3(csr::generate(GraphKind::path, 4), 3);
  CHECK(csr::solve_tree(p4k3, 1).profile == AllocationProfile({1, 2, 3, 1}));

  Game single(csr::load_graph(1, {}), 4);
  CHECK(csr::solve_tree(single, 1).profile == AllocationProfile({1}));
}

TEST_CASE("solve_tree yields an equilibrium from every root of a path") {
  for (int k : {2, 3}) {
    Game g(csr::generate(GraphKind::path, 7), k);
    for (int root = 1; root <= 7; ++root) {
      auto res = csr::solve_tree(g, root);
      csr::validate_profile(res.profile, 7, k);
      CHECK(csr::is_equilibrium(g, res.profile));
      CHECK(oracle::is_equilibrium(g.graph, res.profile, k));
      CHECK(csr::verify_theorem1(g, root));
    }
  }
}

TEST_CASE("solve_tree yields an equilibrium on random trees") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    int n = 5 + static_cast<int>(seed);
    csr::Graph t = csr::generate(GraphKind::random_tree, n, 0.0, seed);
    for (int k : {2, 3, 4}) {
      Game game(t, k);
      for (int root : {1, n / 2 + 1, n}) {
        auto res = csr::solve_tree(game, root);
        CHECK(csr::is_equilibrium(game, res.profile));
        CHECK(oracle::is_equilibrium(game.graph, res.profile, k));
        CHECK(csr::verify_theorem1(game, root));
      }
    }
  }
}

TEST_CASE("intermediate stages never leave an allocated node unsatisfied") {
  // verify_theorem1 checks the invariant after every allocation; exercise it
  // where earlier nodes could plausibly regret: deep spider trees.
  std::vector<std::pair<int, int>> edges{{1, 2}, {2, 3}, {3, 4}, {1, 5}, {5, 6}, {1, 7}, {7, 8}};
  Game spider(csr::load_graph(8, edges), 3);
  CHECK(csr::verify_theorem1(spider, 1));
  CHECK(csr::verify_theorem1(spider, 4));
  auto res = csr::solve_tree(spider, 1);
  CHECK(csr::is_equilibrium(spider, res.profile));
}

}  // TEST_SUITE
