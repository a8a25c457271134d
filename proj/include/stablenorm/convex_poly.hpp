#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <random>
#include <string>
#include <vector>

#include "stablenorm/lattice.hpp"

namespace sn {

using Rational = boost::multiprecision::mpq_rational;
using QVec = std::vector<Rational>;

struct Facet {
  std::vector<int> vertices;  // sorted vertex ids
  RVec normal;                // <normal, x> = 1 on the facet, < 1 inside
  QVec normal_exact;          // filled on the exact path
};

struct SymPolytope {
  int n = 0;
  std::vector<RVec> vertices;
  std::vector<QVec> vertices_exact;  // empty on the float path
  std::vector<std::pair<int, int>> edges;  // i < j, sorted
  std::vector<Facet> facets;
  std::vector<int> antipode;  // vertex id of -v
  bool simplicial = false;
  bool nonempty_interior = false;
  bool exact = false;
};

struct HullOptions {
  // Exact rational arithmetic up to this many (symmetrized) points and rank;
  // beyond, doubles with a relative tolerance.
  size_t exact_point_limit = 1000;
  int exact_rank_limit = 5;
  double float_eps = 1e-9;
  bool force_float = false;
};

// Hull of points together with their negatives. Throws std::invalid_argument
// ("degenerate ...") when the points do not span.
SymPolytope hull_symmetric(const std::vector<RVec>& points, const HullOptions& opt = {});
SymPolytope hull_symmetric_exact(const std::vector<QVec>& points);
SymPolytope hull_symmetric_int(const std::vector<IVec>& points);

SymPolytope cross_polytope(int n);

struct BoundReport {
  int n = 0;
  long long V = 0, E = 0;
  long long half_V_plus_E = 0;
  long long bound = 0;
  bool satisfied = false;
  bool simplicial = false;  // branch
};

long long edge_vertex_bound(int n);  // min(n^2+2n+1, 2n^2-n)
BoundReport check_bound(const SymPolytope& p);
std::string bound_csv_header();
std::string bound_csv_row(const BoundReport& r);

struct MinTableRow {
  int b;
  long long lower_bound;      // min(b^2+2b+1, 2b^2-b)
  long long cross_polytope;   // b + 2b(b-1)
  long long literature_edges; // b(b+2) / b(b+2)-1 for b >= 4, else -1; cited, not verified here
};
std::vector<MinTableRow> min_table(int n_max);

// Structural checks on a hull; returns human-readable failures (empty = fine).
std::vector<std::string> check_invariants(const SymPolytope& p);

// m random points: Gaussian coordinates scaled by 1000 and rounded; resampled
// until the set spans R^n.
std::vector<IVec> random_symmetric_points(int n, int m, std::mt19937_64& rng);

// Drops +- vertex pairs lying within tol outside the hull of the remaining
// vertices (largest facet violation, in Euclidean units), repeatedly.
SymPolytope merge_by_tolerance(const SymPolytope& p, double tol);

std::string serialize_polytope(const SymPolytope& p);
SymPolytope parse_polytope(const std::string& text);

}  // namespace sn
