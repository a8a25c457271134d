#include <stdexcept>
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "stablenorm/homology_shortest.hpp"
#include "stablenorm/periodic_space.hpp"
#include "stablenorm/space_io.hpp"

using namespace sn;

TEST_CASE("flat circle of four vertices") {
  auto s = build_flat_torus(1, 4);
  CHECK(s.num_vertices() == 4);
  int wraps = 0;
  for (int e = 0; e < s.num_edges(); ++e)
    if (s.label(e) == IVec{1}) ++wraps;
  CHECK(wraps >= 1);
  CHECK(minimal_length(s, {1}).length == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("flat torus counts and axis classes") {
  auto s = build_flat_torus(2, 8);
  CHECK(s.num_vertices() == 64);
  HomologySolver solver(s);
  CHECK(solver.N({1, 0}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(solver.N({0, -3}) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("cover symmetry: reverse edges carry negated labels") {
  auto s = build_flat_torus(2, 4);
  for (int e = 0; e < s.num_edges(); ++e) {
    const Edge& ed = s.edge(e);
    const Edge& r = s.edge(ed.reverse);
    CHECK(r.u == ed.v);
    CHECK(r.v == ed.u);
    CHECK(r.length == ed.length);
    CHECK(s.label(ed.reverse) == neg(s.label(e)));
  }
}

TEST_CASE("lift_path is additive and odd under reversal") {
  auto s = build_flat_torus(2, 4);
  CHECK(lift_path(s, {}) == IVec{0, 0});
  auto r = minimal_length(s, {1, 1});
  CHECK(lift_path(s, r.loop) == IVec{1, 1});
  CHECK(lift_path(s, reverse_walk(s, r.loop)) == IVec{-1, -1});
  std::vector<int> twice = r.loop;
  twice.insert(twice.end(), r.loop.begin(), r.loop.end());
  CHECK(lift_path(s, twice) == IVec{2, 2});
  CHECK(is_closed_walk(s, r.loop));
}

TEST_CASE("quotient diameter matches all-pairs oracle") {
  for (int res : {4, 6}) {
    auto s = build_flat_torus(2, res);
    CHECK(quotient_diameter(s) == doctest::Approx(oracle::floyd_diameter(s)).epsilon(1e-9));
  }
  auto f3 = build_flat_torus(3, 4, 1);
  CHECK(quotient_diameter(f3) == doctest::Approx(oracle::floyd_diameter(f3)).epsilon(1e-9));
  for (unsigned seed = 1; seed <= 5; ++seed) {
    auto r = oracle::random_space(2, 9, 6, seed);
    CHECK(quotient_diameter(r) == doctest::Approx(oracle::floyd_diameter(r)).epsilon(1e-9));
  }
}

TEST_CASE("flat diameter is near the Euclidean one") {
  auto s = build_flat_torus(2, 8);
  CHECK(std::fabs(quotient_diameter(s) - std::sqrt(0.5)) < 0.05);
}

TEST_CASE("hedlund highways give unit loops") {
  auto spec = example_axis_highways(3);
  for (const auto& h : spec.highways) CHECK(norm_l1(highway_class(h)) == 1);
  auto s = build_hedlund_graph(spec, 24);
  HomologySolver solver(s);
  for (int i = 0; i < 3; ++i) {
    IVec e(3, 0);
    e[i] = 1;
    double n = solver.N(e);
    CHECK(n <= 1.03);
    CHECK(n >= 0.97);
  }
}

TEST_CASE("hedlund spec preconditions") {
  auto spec = example_axis_highways(3);
  HedlundSpec one = spec;
  one.highways.resize(1);
  CHECK_THROWS_AS(validate_hedlund(one, 24), std::invalid_argument);
  HedlundSpec fat = spec;
  for (auto& h : fat.highways) h.radius = 0.45;
  CHECK_THROWS_AS(validate_hedlund(fat, 24), std::invalid_argument);
  CHECK_THROWS_AS(validate_hedlund(spec, 4), std::invalid_argument);
  CHECK_NOTHROW(validate_hedlund(oracle::small_hedlund(), 16));
}

TEST_CASE("ledger formula and consistency") {
  ConstantsLedger l;
  l.diam = 0.5;
  l.K = 2.0;
  l.D = ConstantsLedger::assemble(3, l.diam, l.K);
  CHECK(l.D == 8.0);
  CHECK(l.consistent(3));
  l.D += 1e-9;
  CHECK_FALSE(l.consistent(3));
}

TEST_CASE("space serialization round trip is exact") {
  auto s = build_hedlund_graph(oracle::small_hedlund(), 16);
  std::string text = serialize_space(s);
  auto p = parse_space(text);
  CHECK(p.num_vertices() == s.num_vertices());
  CHECK(p.num_edges() == s.num_edges());
  CHECK(p.meta == s.meta);
  for (int e = 0; e < s.num_edges(); ++e) {
    CHECK(p.edge(e).length == s.edge(e).length);
    CHECK(p.label(e) == s.label(e));
  }
  CHECK(serialize_space(p) == text);
}

TEST_CASE("malformed space files report the line") {
  auto s = build_flat_torus(1, 3);
  std::string text = serialize_space(s);
  auto pos = text.find("\ne ");
  std::string bad = text.substr(0, pos + 1) + "e 0 1 x 1\n" + text.substr(text.find('\n', pos + 1) + 1);
  try {
    parse_space(bad);
    FAIL("no error");
  } catch (const ParseError& e) {
    int line = 1 + (int)std::count(bad.begin(), bad.begin() + pos + 1, '\n');
    CHECK(e.line == line);
    CHECK(std::string(e.what()).find("line " + std::to_string(line)) == 0);
  }
  CHECK_THROWS_AS(parse_space("stablenorm-space 2\n"), ParseError);
  CHECK_THROWS_AS(parse_space(""), ParseError);
}

TEST_CASE("ledger sidecar round trip and assembly check") {
  ConstantsLedger l;
  l.diam = 0.1 + 0.2;
  l.J = 1.5;
  l.K = 3.25;
  l.D = ConstantsLedger::assemble(2, l.diam, l.K);
  l.k_points = 12;
  l.k_certified = false;
  int rank = 0;
  auto q = parse_ledger(serialize_ledger(l, 2), &rank);
  CHECK(rank == 2);
  CHECK(q.diam == l.diam);
  CHECK(q.D == l.D);
  CHECK(q.k_points == 12);
  CHECK_FALSE(q.k_certified);
  std::string bad = serialize_ledger(l, 2);
  bad.replace(bad.find("D "), 2, "D 1");
  CHECK_THROWS_AS(parse_ledger(bad), ParseError);
}
