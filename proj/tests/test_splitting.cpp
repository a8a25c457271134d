#include <stdexcept>
#include <cmath>
#include <random>

#include "doctest.h"
#include "stablenorm/splitting.hpp"
#include "stablenorm/stable_norm.hpp"

using namespace sn;

namespace {
// direct evaluation of the half-displacement defect
double defect(const PLPath& p, const std::vector<std::pair<double, double>>& iv) {
  RVec sum(p.dim(), 0.0);
  for (auto [a, b] : iv) {
    RVec x = p.at(a), y = p.at(b);
    for (int k = 0; k < p.dim(); ++k) sum[k] += y[k] - x[k];
  }
  RVec full = p.at(p.length()), start = p.at(0);
  double m = 0;
  for (int k = 0; k < p.dim(); ++k) m = std::max(m, std::fabs(sum[k] - (full[k] - start[k]) / 2));
  return m;
}
}  // namespace

TEST_CASE("straight path splits into one interval") {
  auto p = polyline_path({{0, 0}, {3, 0}});
  auto r = split_path(p);
  CHECK(r.certified);
  CHECK(r.d == 1);
  CHECK(r.residual < 1e-12);
  CHECK(defect(p, r.intervals) < 1e-12);
}

TEST_CASE("path interpolation") {
  auto p = polyline_path({{0, 0}, {3, 0}, {3, 4}});
  CHECK(p.length() == doctest::Approx(7.0));
  CHECK(p.at(5.0)[1] == doctest::Approx(2.0));
  CHECK(p.velocity(1.0)[0] == doctest::Approx(1.0));
  CHECK(p.velocity(7.0)[1] == doctest::Approx(1.0));
  CHECK(p.at(8.0)[1] == doctest::Approx(4.0));  // clamped
  PLPath bad;
  bad.t = {0, 1, 1};
  bad.x = {{0}, {1}, {2}};
  CHECK_THROWS(bad.validate());
}

TEST_CASE("random polylines: certified splits have small residual and few intervals") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g;
  for (int b : {2, 3}) {
    int certified = 0;
    for (int i = 0; i < 25; ++i) {
      std::vector<RVec> pts(3 + i % 6, RVec(b));
      for (auto& q : pts)
        for (auto& c : q) c = g(rng);
      auto p = polyline_path(pts);
      auto r = split_path(p);
      if (!r.certified) continue;
      ++certified;
      CHECK(r.residual <= 1e-6);
      CHECK(r.d <= (b + 1) / 2);
      CHECK(defect(p, r.intervals) <= 1e-6);
      CHECK(partition_residual(p, r.intervals) == doctest::Approx(r.residual).epsilon(1e-6).scale(1e-9));
      for (size_t k = 0; k < r.intervals.size(); ++k) {
        CHECK(r.intervals[k].first < r.intervals[k].second);
        if (k) CHECK(r.intervals[k - 1].second <= r.intervals[k].first);
      }
    }
    CHECK(certified >= 24);
  }
}

TEST_CASE("splitting map of the constant sign vector") {
  auto p = polyline_path({{0, 0}, {1, 2}, {4, 2}});
  auto v = splitting_map(p, {1.0, 0.0, 0.0});
  auto end = p.at(p.length());
  CHECK(v[0] == doctest::Approx(end[0]));
  CHECK(v[1] == doctest::Approx(end[1]));
}

TEST_CASE("loop variant reproduces the half class") {
  auto s = build_flat_torus(2, 8);
  HomologySolver solver(s);
  for (IVec z : {IVec{2, 0}, IVec{2, 2}, IVec{4, 2}}) {
    auto r = solver.minimal_length(z);
    auto part = split_loop_with_basepoint(s, r.loop);
    REQUIRE(part.certified);
    for (int k = 0; k < 2; ++k) CHECK(std::fabs(part.half[k] - z[k] / 2.0) <= 1e-6);
    CHECK(part.offset >= 0);
    if (!part.intervals.empty()) CHECK(part.intervals.front().first == doctest::Approx(0.0));
  }
}

TEST_CASE("doubling construction gives two loops of class z") {
  auto s = build_flat_torus(2, 8);
  HomologySolver solver(s);
  auto l = derive_ledger(solver);
  auto rep = double_then_halve(solver, l, {1, 1});
  CHECK(lift_path(s, rep.walk_plus) == IVec{1, 1});
  CHECK(lift_path(s, rep.walk_minus) == IVec{1, 1});
  CHECK(rep.sum_bound);
  CHECK(rep.doubling_bound);
  CHECK(rep.n_z >= rep.n_2z / 2 - 1e-12);
}

TEST_CASE("path csv round trip") {
  auto p = polyline_path({{0, 0.5}, {1.25, 2}, {3, -1}});
  auto q = parse_path_csv(path_csv(p));
  REQUIRE(q.x.size() == p.x.size());
  for (size_t i = 0; i < p.x.size(); ++i) {
    CHECK(q.t[i] == p.t[i]);
    CHECK(q.x[i] == p.x[i]);
  }
  auto r = split_path(p);
  CHECK(partition_csv(r).rfind("sigma,tau", 0) == 0);
  CHECK_THROWS(parse_path_csv("t,x\n0,a\n"));
}
