#pragma once

#include <string>
#include <utility>
#include <vector>

#include "stablenorm/homology_shortest.hpp"
#include "stablenorm/lattice.hpp"
#include "stablenorm/periodic_space.hpp"

namespace sn {

// Piecewise-linear path, knots at strictly increasing times starting at 0.
struct PLPath {
  std::vector<double> t;
  std::vector<RVec> x;
  int dim() const { return x.empty() ? 0 : (int)x.front().size(); }
  double length() const { return t.empty() ? 0.0 : t.back(); }
  RVec at(double s) const;
  RVec velocity(double s) const;  // right derivative (left at the end)
  void validate() const;
};

// Parametrized by Euclidean arc length.
PLPath polyline_path(const std::vector<RVec>& points);

struct SplitOptions {
  double eps = 1e-6;
  int grid = 0;      // per face and axis; 0 picks by rank
  int starts = 1000;  // refinement starts, best grid points first; stops at the first success
  int max_iter = 400;
  double zero_coord = 1e-9;
};

struct SplittingPartition {
  std::vector<std::pair<double, double>> intervals;  // (sigma, tau), ordered, disjoint
  int d = 0;
  double residual = 0.0;  // |sum rho(tau)-rho(sigma) - (rho(l)-rho(0))/2|
  bool certified = false;
  RVec half;              // sum of the interval displacements
  RVec sphere_point;      // zero of the antipodal map, in S^b
  double offset = 0.0;    // loop variant: start rotated to the first sigma
};

// v(z) = sum_i sign(z_i) (rho(t_i) - rho(t_{i-1})), t_k = l sum_{i<=k} z_i^2.
RVec splitting_map(const PLPath& p, const RVec& z);

SplittingPartition split_path(const PLPath& p, const SplitOptions& opt = {});
// Recomputes the residual of a partition from the path.
double partition_residual(const PLPath& p, const std::vector<std::pair<double, double>>& intervals);

// Lift of a closed walk to the cover, parametrized by metric length.
PLPath lift_walk(const PeriodicSpace& s, const std::vector<int>& loop);
// Splits the lifted loop and rotates the start to the first interval.
SplittingPartition split_loop_with_basepoint(const PeriodicSpace& s, const std::vector<int>& loop,
                                             const SplitOptions& opt = {});

struct DoublingReport {
  IVec z;
  double n_z = 0, n_2z = 0, D = 0;
  SplittingPartition split;
  std::vector<int> walk_plus, walk_minus;  // closed walks, both of class z
  double len_plus = 0, len_minus = 0;
  bool sum_bound = false;     // len_plus + len_minus <= N(2z) + D
  bool doubling_bound = false;  // 2 N(z) <= N(2z) + D
};

// Splits a minimal loop of class 2z into two loops of class z as in the
// doubling argument: pieces joined by shortest connectors, then corrected by a
// short loop of the missing class.
DoublingReport double_then_halve(HomologySolver& solver, const ConstantsLedger& ledger, const IVec& z,
                                 const SplitOptions& opt = {});

PLPath parse_path_csv(const std::string& text);
std::string path_csv(const PLPath& p);
std::string partition_csv(const SplittingPartition& p);

}  // namespace sn
