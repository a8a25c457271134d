#pragma once

#include <string>
#include <vector>

#include "stablenorm/convex_poly.hpp"
#include "stablenorm/homology_shortest.hpp"
#include "stablenorm/quasinorm.hpp"

namespace sn {

// Tolerances for the two data regimes.
constexpr double kExactTol = 1e-9;
constexpr double kGraphTol = 1e-2;

struct StableNormEstimate {
  IVec direction;
  double value = 0.0;
  double lo = 0.0, hi = 0.0;  // both rigorous given a correct ledger
  double n_z = 0.0;           // N(z) (an upper bound when not certified)
  double n_z_lower = 0.0;
  bool n_z_certified = false;
  long long k_best = 1;  // multiple realizing hi
  HomogenizationResult trace;
};

struct StableOptions {
  double tol = kGraphTol;
  long long k_max = 16;
  // Search budget for the multiples kz, k >= 2 (their loops serve as upper
  // bounds; certification is not needed there).
  size_t bulk_budget = 30000;
};

// Homogenization of N along z with delta = 2 diam, intersected with the
// a-priori band [N(z) - D, N(z)], the repeated-loop bound min_k N(kz)/k and the
// calibrated-covector lower bound. Throws std::runtime_error on an empty band.
StableNormEstimate stable_norm_of(HomologySolver& solver, const ConstantsLedger& ledger, const IVec& z,
                                  const StableOptions& opt = {});

// diam, J, K and D with a bootstrap of unit-vector estimates from repeated loops.
ConstantsLedger derive_ledger(HomologySolver& solver, size_t k_search_budget = 20000,
                              size_t lattice_point_budget = 20000);

struct BallPoint {
  IVec direction;
  RVec point;  // direction / value
  double value = 0, lo = 0, hi = 0;
  double error_radius = 0;  // Euclidean, assuming the band is correct
};

struct BallCloud {
  int rank = 0;
  std::vector<BallPoint> points;  // sorted by direction, closed under negation
};

// One estimate per +-pair; directions must be primitive and pairwise
// non-parallel after symmetrization.
BallCloud sample_ball(HomologySolver& solver, const ConstantsLedger& ledger, const std::vector<IVec>& directions,
                      const StableOptions& opt = {}, std::vector<StableNormEstimate>* estimates = nullptr);
// direction,value,lo,hi,n_z,n_z_lower,n_z_certified,k_best
std::string estimates_csv(const std::vector<StableNormEstimate>& est);
// Primitive vectors with sup-norm <= radius, one per +-pair.
std::vector<IVec> default_directions(int rank, int radius = 2);

std::string ball_cloud_csv(const BallCloud& c);
BallCloud parse_ball_cloud_csv(const std::string& text);
SymPolytope cloud_hull(const BallCloud& c);

struct DualVector {
  RVec omega;
  double dual_norm = 0;
  double error = 0;            // from the per-point radii
  bool inner_approximation = true;  // sup over samples only
};
DualVector dual_norm_of(const BallCloud& cloud, const RVec& omega);
// Exact dual of a polytope ball: max over vertices.
double polytope_dual_norm(const SymPolytope& p, const RVec& omega);

struct FaceDescriptor {
  RVec omega;                // rescaled to dual norm 1
  std::vector<int> vertices;  // polytope vertex ids on H_omega
  int dimension = -1;
};
FaceDescriptor exposed_face(const SymPolytope& p, const RVec& omega, double tol = kExactTol);
// Exact variant on the rational vertices of an exact hull.
FaceDescriptor exposed_face_exact(const SymPolytope& p, const QVec& omega);
std::string face_record(const SymPolytope& p, const FaceDescriptor& f);

}  // namespace sn
