#include <stdexcept>
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "stablenorm/homology_shortest.hpp"
#include "stablenorm/stable_norm.hpp"

using namespace sn;

TEST_CASE("minimal loops match the cover Dijkstra oracle") {
  auto s = build_flat_torus(2, 4, 1);
  HomologySolver solver(s);
  for (IVec z : {IVec{1, 0}, IVec{1, 1}, IVec{2, 1}, IVec{-1, 2}, IVec{3, 0}}) {
    auto r = solver.minimal_length(z);
    CHECK(r.optimal_certified);
    CHECK(lift_path(s, r.loop) == z);
    CHECK(r.length == doctest::Approx(walk_length(s, r.loop)).epsilon(1e-12));
    CHECK(r.length == doctest::Approx(oracle::cover_shortest_loop(s, z, 2)).epsilon(1e-12));
  }
}

TEST_CASE("irregular graphs: minimal loops against the oracle") {
  for (unsigned seed = 1; seed <= 4; ++seed) {
    auto s = oracle::random_space(2, 7, 5, seed);
    HomologySolver solver(s);
    for (IVec z : {IVec{1, 0}, IVec{0, 1}, IVec{1, -1}, IVec{2, 1}}) {
      auto r = solver.minimal_length(z);
      CHECK(lift_path(s, r.loop) == z);
      CHECK(r.length == doctest::Approx(oracle::cover_shortest_loop(s, z, 3)).epsilon(1e-9));
    }
  }
  auto f3 = build_flat_torus(3, 4, 1);
  HomologySolver s3(f3);
  for (IVec z : {IVec{1, 1, 0}, IVec{0, 1, -1}, IVec{1, 1, 1}})
    CHECK(s3.N(z) == doctest::Approx(oracle::cover_shortest_loop(f3, z, 1)).epsilon(1e-9));
}

TEST_CASE("flat (3,4) is within 2% of 5") {
  auto s = build_flat_torus(2, 16);
  HomologySolver solver(s);
  double n = solver.N({3, 4});
  CHECK(std::fabs(n - 5.0) / 5.0 < 0.02);
}

TEST_CASE("N is symmetric and subadditive on a flat torus") {
  auto s = build_flat_torus(2, 6);
  HomologySolver solver(s);
  double diam = quotient_diameter(s);
  auto q = graph_quasinorm(solver, 2 * diam);
  std::mt19937_64 rng(11);
  auto rep = verify_quasinorm_axioms(q, random_pairs(2, 3, 40, rng));
  CHECK(rep.ok());
}

TEST_CASE("constants ledger on a small flat torus") {
  auto s = build_flat_torus(2, 8);
  HomologySolver solver(s);
  auto l = derive_ledger(solver);
  CHECK(l.consistent(2));
  CHECK(l.D >= 7 * l.diam);
  CHECK(l.J >= 0);
  CHECK(l.K >= 0);
  CHECK(l.diam == doctest::Approx(oracle::floyd_diameter(s)).epsilon(1e-9));
}

TEST_CASE("hedlund K covers the highway classes") {
  auto s = build_hedlund_graph(oracle::small_hedlund(), 16);
  HomologySolver solver(s);
  auto l = derive_ledger(solver);
  CHECK(l.consistent(3));
  CHECK(l.K >= 1.0);
}

TEST_CASE("rotation helpers keep the class") {
  auto s = build_flat_torus(2, 4);
  auto r = minimal_length(s, {2, 1});
  for (size_t k = 0; k < r.loop.size(); ++k) {
    auto w = rotate_walk(r.loop, k);
    CHECK(is_closed_walk(s, w));
    CHECK(lift_path(s, w) == IVec{2, 1});
  }
  auto lr = least_rotation(r.loop);
  CHECK(least_rotation(rotate_walk(r.loop, 1)) == lr);
}
