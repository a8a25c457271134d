#include <stdexcept>
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "stablenorm/stable_norm.hpp"

using namespace sn;

TEST_CASE("flat stable norm is Euclidean within the grid error") {
  auto s = build_flat_torus(2, 16);
  HomologySolver solver(s);
  auto l = derive_ledger(solver);
  for (IVec z : {IVec{1, 0}, IVec{1, 1}, IVec{2, 1}, IVec{1, -3}}) {
    auto e = stable_norm_of(solver, l, z);
    double ref = norm_l2(z);
    CHECK(std::fabs(e.value - ref) / ref < 0.03);
    CHECK(e.lo <= e.value);
    CHECK(e.value <= e.hi);
    CHECK(e.hi <= e.n_z + 1e-12);
    CHECK(e.n_z <= e.value + l.D);
  }
  auto e = stable_norm_of(solver, l, {1, 0});
  CHECK(e.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hedlund axis classes have stable norm one") {
  auto s = build_hedlund_graph(oracle::small_hedlund(), 16);
  HomologySolver solver(s);
  auto l = derive_ledger(solver);
  auto e = stable_norm_of(solver, l, {0, 1, 0});
  CHECK(e.value == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("ball cloud csv round trip and hull") {
  auto s = build_flat_torus(2, 8);
  HomologySolver solver(s);
  auto l = derive_ledger(solver);
  std::vector<StableNormEstimate> est;
  auto c = sample_ball(solver, l, default_directions(2, 1), {}, &est);
  CHECK(est.size() == 4);  // (0,1) (1,-1) (1,0) (1,1)
  CHECK(c.points.size() == 8);
  for (size_t i = 1; i < c.points.size(); ++i) CHECK(c.points[i - 1].direction < c.points[i].direction);
  auto q = parse_ball_cloud_csv("# header\n" + ball_cloud_csv(c));
  REQUIRE(q.points.size() == c.points.size());
  for (size_t i = 0; i < q.points.size(); ++i) {
    CHECK(q.points[i].direction == c.points[i].direction);
    CHECK(q.points[i].value == c.points[i].value);
    CHECK(q.points[i].point == c.points[i].point);
  }
  auto h = cloud_hull(c);
  CHECK(h.vertices.size() == 8);
  CHECK(estimates_csv(est).rfind("direction,value,lo,hi,n_z,", 0) == 0);
  CHECK_THROWS(sample_ball(solver, l, {{2, 2}}));
}

TEST_CASE("dual norm of a square cloud and of the cross polytope") {
  BallCloud c;
  c.rank = 2;
  for (IVec d : {IVec{1, 0}, IVec{0, 1}, IVec{-1, 0}, IVec{0, -1}}) {
    BallPoint p;
    p.direction = d;
    p.point = to_real(d);
    p.value = 1;
    c.points.push_back(p);
  }
  auto d = dual_norm_of(c, {3, -4});
  CHECK(d.dual_norm == doctest::Approx(4.0));
  CHECK(polytope_dual_norm(cross_polytope(3), {1, -2, 0.5}) == doctest::Approx(2.0));
  BallCloud flat;
  flat.rank = 2;
  flat.points = {c.points[0], c.points[2]};
  CHECK_THROWS_AS(dual_norm_of(flat, {1, 0}), std::invalid_argument);
}

TEST_CASE("exposed faces of the octahedron") {
  auto p = cross_polytope(3);
  auto v = exposed_face(p, {1, 0, 0});
  CHECK(v.dimension == 0);
  CHECK(v.vertices.size() == 1);
  auto e = exposed_face(p, {1, 1, 0});
  CHECK(e.dimension == 1);
  auto f = exposed_face(p, {1, 1, 1});
  CHECK(f.dimension == 2);
  CHECK(f.vertices.size() == 3);
  CHECK(f.omega[0] == doctest::Approx(1.0));
  auto x = hull_symmetric_int({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  auto fx = exposed_face_exact(x, {Rational(1), Rational(1), Rational(0)});
  CHECK(fx.dimension == 1);
  CHECK(face_record(p, f).find("\"dimension\": 2") != std::string::npos);
  CHECK_THROWS_AS(exposed_face(p, {0, 0, 0}), std::invalid_argument);
}
