#pragma once

#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "stablenorm/lattice.hpp"

namespace sn {

struct QuasiNorm {
  int rank = 0;
  std::function<double(const IVec&)> evaluate;
  double delta = 0.0;           // declared quasi-triangle defect
  bool subhomogeneous = false;  // N(k z) <= k N(z) is known to hold
};

struct HomogenizationStep {
  long long k;
  double n_kz;   // N(k z)
  double upper;  // (N(k z) + delta) / k
};

struct HomogenizationResult {
  IVec direction;
  double value = 0.0;
  long long k_used = 0;
  double residual = 0.0;
  double lo = 0.0, hi = 0.0;
  bool reached_k_max = false;  // stopped by the budget, not by the tolerance
  std::vector<HomogenizationStep> trace;
};

// k = 1, 2, 4, ... while below k_max, then k_max - 1 and k_max.
std::vector<long long> homogenization_schedule(long long k_max);

HomogenizationResult homogenize(const QuasiNorm& qn, const IVec& z, double tol, long long k_max);

double estimate_doubling_constant(const QuasiNorm& qn, const std::vector<IVec>& sample);

struct AxiomViolation {
  std::string axiom;  // "definiteness", "symmetry", "quasi-triangle"
  IVec z, w;
  double lhs = 0, rhs = 0;
};

struct AxiomReport {
  std::vector<AxiomViolation> violations;
  size_t pairs_checked = 0;
  bool ok() const { return violations.empty(); }
};

AxiomReport verify_quasinorm_axioms(const QuasiNorm& qn,
                                    const std::vector<std::pair<IVec, IVec>>& pairs);

// Random pairs with coordinates in [-radius, radius], both entries non-zero.
std::vector<std::pair<IVec, IVec>> random_pairs(int rank, int radius, size_t count,
                                                std::mt19937_64& rng);

// Largest observed N(z+w) - N(z) - N(w) over the pairs, times two.
double default_delta(const QuasiNorm& qn, const std::vector<std::pair<IVec, IVec>>& pairs);

// Word length on Z^b with respect to S and -S.
class WordNorm {
 public:
  explicit WordNorm(std::vector<IVec> generators, size_t state_budget = 20'000'000);
  int rank() const { return rank_; }
  long long length(const IVec& z) const;
  QuasiNorm as_quasinorm() const;
  const std::vector<IVec>& generators() const { return gens_; }

 private:
  int rank_;
  std::vector<IVec> gens_;  // S together with -S, deduplicated
  size_t budget_;
};

}  // namespace sn
