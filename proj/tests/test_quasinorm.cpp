#include <stdexcept>
#include <random>

#include "doctest.h"
#include "stablenorm/quasinorm.hpp"

using namespace sn;

TEST_CASE("schedule doubles then finishes at k_max") {
  CHECK(homogenization_schedule(16) == std::vector<long long>{1, 2, 4, 8, 15, 16});
  CHECK(homogenization_schedule(1) == std::vector<long long>{1});
}

TEST_CASE("word norm on Z^2 with the unit generators is l1") {
  WordNorm w({{1, 0}, {0, 1}});
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long long> c(-20, 20);
  for (int i = 0; i < 30; ++i) {
    IVec z{c(rng), c(rng)};
    CHECK(w.length(z) == norm_l1(z));
  }
  CHECK(w.length({0, 0}) == 0);
}

TEST_CASE("word norm with a diagonal generator") {
  WordNorm w({{1, 0}, {0, 1}, {1, 1}});
  // oracle: max(|a|,|b|) if same sign else |a|+|b|
  for (long long a = -5; a <= 5; ++a)
    for (long long b = -5; b <= 5; ++b) {
      long long want = (a * b >= 0) ? std::max(std::llabs(a), std::llabs(b)) : std::llabs(a) + std::llabs(b);
      CHECK(w.length({a, b}) == want);
    }
}

TEST_CASE("homogenized word norm equals l1 exactly") {
  WordNorm w({{1, 0}, {0, 1}});
  auto qn = w.as_quasinorm();
  for (IVec z : {IVec{1, 0}, IVec{3, -4}, IVec{-2, 7}, IVec{5, 5}}) {
    auto r = homogenize(qn, z, 1e-12, 16);
    CHECK(r.value == double(norm_l1(z)));
    CHECK(r.lo <= r.value);
  }
}

TEST_CASE("axiom verification catches a broken quasi-norm") {
  QuasiNorm q;
  q.rank = 1;
  q.delta = 0;
  q.evaluate = [](const IVec& z) { return double(z[0] * z[0]); };  // not subadditive with delta 0
  auto rep = verify_quasinorm_axioms(q, {{IVec{1}, IVec{1}}, {IVec{2}, IVec{3}}});
  CHECK_FALSE(rep.ok());
  bool tri = false;
  for (const auto& v : rep.violations) tri = tri || v.axiom == "quasi-triangle";
  CHECK(tri);
  QuasiNorm asym;
  asym.rank = 1;
  asym.delta = 10;
  asym.evaluate = [](const IVec& z) { return z[0] > 0 ? 1.0 : 2.0 * std::llabs(z[0]); };
  rep = verify_quasinorm_axioms(asym, {{IVec{1}, IVec{2}}});
  bool sym = false;
  for (const auto& v : rep.violations) sym = sym || v.axiom == "symmetry";
  CHECK(sym);
}

TEST_CASE("word norm passes the axioms with delta 0") {
  WordNorm w({{1, 0}, {0, 1}});
  std::mt19937_64 rng(3);
  auto pairs = random_pairs(2, 5, 100, rng);
  CHECK(pairs.size() == 100);
  auto rep = verify_quasinorm_axioms(w.as_quasinorm(), pairs);
  CHECK(rep.ok());
  CHECK(rep.pairs_checked == 100);
}

TEST_CASE("estimated doubling constant of l1 is zero") {
  WordNorm w({{1, 0}, {0, 1}});
  CHECK(estimate_doubling_constant(w.as_quasinorm(), {{1, 2}, {3, -1}}) == doctest::Approx(0.0));
}

TEST_CASE("homogenize rejects bad arguments") {
  WordNorm w({{1, 0}, {0, 1}});
  auto qn = w.as_quasinorm();
  CHECK_THROWS_AS(homogenize(qn, {1, 0, 0}, 1e-3, 4), std::invalid_argument);
  CHECK_THROWS_AS(homogenize(qn, {1, 0}, 0.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(homogenize(qn, {1, 0}, 1e-3, 0), std::invalid_argument);
}
