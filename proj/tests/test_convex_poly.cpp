#include <stdexcept>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "stablenorm/convex_poly.hpp"

using namespace sn;

TEST_CASE("cross polytopes") {
  for (int n = 1; n <= 6; ++n) {
    auto p = cross_polytope(n);
    CHECK(p.vertices.size() == size_t(2 * n));
    CHECK(p.edges.size() == size_t(2 * n * (n - 1)));
    CHECK(check_invariants(p).empty());
  }
  auto r = check_bound(cross_polytope(3));
  CHECK(r.half_V_plus_E == 15);
  CHECK(r.bound == 15);
  CHECK(r.satisfied);
}

TEST_CASE("cube, exact and floating") {
  std::vector<IVec> pts;
  for (int a : {-1, 1})
    for (int b : {-1, 1})
      for (int c : {-1, 1}) pts.push_back({a, b, c});
  auto e = hull_symmetric_int(pts);
  CHECK(e.exact);
  CHECK(e.vertices.size() == 8);
  CHECK(e.edges.size() == 12);
  CHECK(e.facets.size() == 6);
  HullOptions o;
  o.force_float = true;
  std::vector<RVec> rp;
  for (auto& q : pts) rp.push_back(to_real(q));
  auto f = hull_symmetric(rp, o);
  CHECK_FALSE(f.exact);
  CHECK(f.vertices.size() == 8);
  CHECK(f.edges.size() == 12);
  CHECK(check_bound(f).satisfied);
}

TEST_CASE("interior and collinear points are not vertices") {
  std::vector<IVec> pts{{2, 0, 0}, {0, 2, 0}, {0, 0, 2}, {1, 1, 0}, {0, 0, 1}, {1, 0, 1}};
  auto p = hull_symmetric_int(pts);
  CHECK(p.vertices.size() == 6);
  CHECK(p.edges.size() == 12);
}

TEST_CASE("hull counts match brute-force oracles") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 40; ++i) {
    auto pts = random_symmetric_points(2, 2 + i % 7, rng);
    std::vector<RVec> rp;
    for (auto& q : pts) rp.push_back(to_real(q));
    auto p = hull_symmetric_int(pts);
    CHECK(p.vertices.size() == oracle::polygon_vertices(rp));
    CHECK(p.edges.size() == p.vertices.size());
  }
  for (int i = 0; i < 25; ++i) {
    auto pts = random_symmetric_points(3, 3 + i % 6, rng);
    auto p = hull_symmetric_int(pts);
    auto [V, E] = oracle::brute_hull3(pts);
    CHECK(p.vertices.size() == V);
    CHECK(p.edges.size() == E);
    // Euler
    CHECK((long long)p.vertices.size() - (long long)p.edges.size() + (long long)p.facets.size() == 2);
  }
}

TEST_CASE("random symmetric hulls satisfy the edge vertex bound") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> extra(0, 8);
  for (int n = 2; n <= 5; ++n)
    for (int i = 0; i < 30; ++i) {
      auto p = hull_symmetric_int(random_symmetric_points(n, n + extra(rng), rng));
      CHECK(check_bound(p).satisfied);
      CHECK(check_invariants(p).empty());
    }
}

TEST_CASE("bound formula and table") {
  CHECK(edge_vertex_bound(2) == 6);
  CHECK(edge_vertex_bound(3) == 15);
  CHECK(edge_vertex_bound(4) == 25);
  CHECK(edge_vertex_bound(5) == 36);
  CHECK(edge_vertex_bound(6) == 49);
  auto t = min_table(6);
  CHECK(t.size() == 6);
  CHECK(t[2].b == 3);
  CHECK(t[2].cross_polytope == 15);
}

TEST_CASE("check_bound rejects odd vertex counts and flat hulls") {
  SymPolytope p = cross_polytope(3);
  p.vertices.pop_back();
  CHECK_THROWS(check_bound(p));
  CHECK_THROWS_AS(hull_symmetric_int({{1, 0, 0}, {0, 1, 0}}), std::invalid_argument);
}

TEST_CASE("bound csv") {
  auto r = check_bound(cross_polytope(3));
  CHECK(bound_csv_header() == "n,V,E,half_V_plus_E,bound,satisfied,branch");
  CHECK(bound_csv_row(r).rfind("3,6,12,15,15,true,simplicial", 0) == 0);
}

TEST_CASE("polytope serialization round trip") {
  auto p = hull_symmetric_int({{3, 1, 0}, {0, 2, 1}, {1, -1, 2}, {1, 1, 1}});
  auto q = parse_polytope(serialize_polytope(p));
  CHECK(q.vertices.size() == p.vertices.size());
  CHECK(q.edges == p.edges);
  CHECK(q.facets.size() == p.facets.size());
  CHECK(serialize_polytope(q) == serialize_polytope(p));
  CHECK_THROWS(parse_polytope("nonsense\n"));
}

TEST_CASE("tolerance merge drops a nearly redundant pair") {
  std::vector<RVec> pts{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0.34, 0.34, 0.34}};
  auto raw = hull_symmetric(pts);
  CHECK(raw.vertices.size() == 8);
  auto m = merge_by_tolerance(raw, 0.05);
  CHECK(m.vertices.size() == 6);
  CHECK(m.edges.size() == 12);
  CHECK(merge_by_tolerance(raw, 1e-6).vertices.size() == 8);
}

TEST_CASE("antipodes pair up") {
  auto p = hull_symmetric_int({{2, 1, 0}, {0, 1, 3}, {1, 1, 1}, {-1, 2, 0}});
  for (size_t v = 0; v < p.vertices.size(); ++v) {
    int a = p.antipode[v];
    for (int k = 0; k < 3; ++k) CHECK(p.vertices[a][k] == -p.vertices[v][k]);
  }
}
