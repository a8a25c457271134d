#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "stablenorm/lattice.hpp"
#include "stablenorm/periodic_space.hpp"
#include "stablenorm/quasinorm.hpp"

namespace sn {

struct MinimalLengthResult {
  IVec cls;
  double length = 0.0;
  double lower_bound = 0.0;  // = length when certified; else the search frontier
  std::vector<int> loop;  // closed walk, lift_path(loop) == cls
  long long window_radius = 0;
  bool optimal_certified = true;
  size_t states_expanded = 0;
  std::string warning;
};

struct SearchOptions {
  size_t state_budget = 2'000'000;  // expanded product-graph states per call
  // Budget for the sup-norm-1 classes that seed the constructive upper bounds
  // (never below state_budget).
  size_t base_budget = 2'000'000;
  // Optional extra cap on the loop length (e.g. the a-priori bound
  // stable estimate + D). Loops longer than this are not searched for.
  double length_cap = INFINITY;
};

// A covector together with a potential on the vertices such that
// c<omega,label(e)> + phi(v) - phi(u) <= length(e) on every edge.
struct CalibratedCovector {
  RVec omega;
  double c = 0.0;      // 1 / (max cycle ratio of <omega,label> over length)
  std::vector<double> phi;
  std::vector<double> reduced;  // per-edge slack, >= 0
  std::vector<double> cw;       // per-edge c<omega,label(e)>
};

// Max cycle ratio sum<omega,label>/sum length by policy iteration, then the
// potential. Returns c = 0 when no cycle has positive pairing.
CalibratedCovector calibrate_covector(const PeriodicSpace& s, const RVec& omega);

// Shortest closed walks in prescribed homology classes. Keeps caches of
// results and calibrated covectors; calls are serialized internally.
class HomologySolver {
 public:
  explicit HomologySolver(const PeriodicSpace& s, SearchOptions opts = {});
  const PeriodicSpace& space() const { return s_; }

  MinimalLengthResult minimal_length(const IVec& z, const ConstantsLedger* ledger = nullptr);
  double N(const IVec& z) { return minimal_length(z).length; }

  // Upper bound on the loop length used before the search (constructive).
  double crude_bound(const IVec& z);

  const SearchOptions& options() const { return opts_; }
  void set_options(const SearchOptions& o) { opts_ = o; }
  size_t cache_size() const { return cache_.size(); }
  const CalibratedCovector& covector(const RVec& omega);

 private:
  MinimalLengthResult solve(const IVec& z, const ConstantsLedger* ledger, size_t budget);
  // With `through`, searches loops based at one of the given vertices only,
  // shorter than cap_hint.
  MinimalLengthResult search(const IVec& z, const ConstantsLedger* ledger, size_t budget,
                             const std::vector<int>* through = nullptr, double cap_hint = INFINITY);
  std::vector<int> constructive_loop(const IVec& z, size_t budget);
  double max_edge_ratio_inf() const;

  const PeriodicSpace& s_;
  SearchOptions opts_;
  std::map<IVec, std::pair<MinimalLengthResult, size_t>> cache_;  // result, budget used
  std::map<RVec, std::unique_ptr<CalibratedCovector>> covectors_;
  std::recursive_mutex mu_;
};

// Convenience wrapper with a throwaway solver.
MinimalLengthResult minimal_length(const PeriodicSpace& s, const IVec& z, const ConstantsLedger* ledger = nullptr);

// Rotate a closed walk so it starts at the first visit of `vertex`.
std::vector<int> minimal_loop_as_cycle(const PeriodicSpace& s, const MinimalLengthResult& r, int vertex);
std::vector<int> rotate_walk(const std::vector<int>& walk, size_t offset);
// Lexicographically smallest rotation of a cyclic edge sequence.
std::vector<int> least_rotation(const std::vector<int>& walk);

// N as a quasi-norm (free loops are subhomogeneous).
QuasiNorm graph_quasinorm(HomologySolver& solver, double delta);

// Lower bound on the stable norm from the calibrated coordinate covectors.
double stable_lower_bound(HomologySolver& solver, const IVec& y);

// diam, J, K and D. `bootstrap_stable` holds stable-norm estimates (upper
// bounds) at least for the unit vectors; K enumerates every lattice point whose
// stable norm can lie inside the ball, using stable_lower_bound for the test.
ConstantsLedger compute_constants(HomologySolver& solver, const std::map<IVec, double>& bootstrap_stable,
                                  size_t lattice_point_budget = 20000);

}  // namespace sn
