#pragma once

#include <functional>
#include <string>
#include <vector>

#include "stablenorm/convex_poly.hpp"
#include "stablenorm/homology_shortest.hpp"
#include "stablenorm/periodic_space.hpp"

namespace sn {

// g = f^2 g_flat on R^n / Z^n; f_grad returns f and writes its gradient.
struct ConformalTorusMetric {
  int n = 0;
  std::function<double(const RVec&, RVec&)> f_grad;
  std::string name;
};
ConformalTorusMetric constant_metric(int n, double c);
// Smooth Hedlund factor (no access paths).
ConformalTorusMetric hedlund_smooth_metric(const HedlundSpec& spec);

struct IntegratorOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  double dt_init = 1e-3;
  double dt_min = 1e-12;
  double dt_max = 0.05;
  double renorm_threshold = 1e-12;  // rescale the velocity above this speed error
};

struct RenormEvent {
  double t;
  double speed_error;  // metric speed - 1 before rescaling
};

struct GeodesicTrace {
  enum class Kind { continuous, discrete };
  Kind kind = Kind::continuous;
  std::vector<double> t;    // increasing; t[origin] = 0
  std::vector<RVec> pos;    // cover positions
  size_t origin = 0;
  std::vector<RenormEvent> renorm;
  double max_drift_rate = 0;  // max speed error per unit time between rescalings
  // discrete traces
  std::vector<int> walk;       // edge k joins knots k and k+1
  std::vector<IVec> labels;    // cumulative homology label at each knot, 0 at the origin
  double t_min() const { return t.front(); }
  double t_max() const { return t.back(); }
  RVec at(double s) const;  // linear interpolation
};

// Arclength geodesic from x0 with direction d0 (rescaled to metric speed 1),
// integrated with adaptive Dormand-Prince on [0, t_max].
GeodesicTrace integrate_geodesic(const ConformalTorusMetric& g, const RVec& x0, const RVec& d0, double t_max,
                                 const IntegratorOptions& opt = {});

// Closed walk repeated `reps` times in each direction around its start.
GeodesicTrace periodic_trace(const PeriodicSpace& s, const std::vector<int>& loop, int reps);
GeodesicTrace reverse_trace(const GeodesicTrace& tr);

struct EdgeRayOptions {
  int depth = 20;        // i = 1..depth
  int vote_window = 5;   // the last loops taking part in the majority vote
  size_t loop_budget = 30000;
  double min_window = 8.0;  // metric length required on each side for convergence
  double tol = 1e-9;
  std::vector<double> horizons;  // classification ladder; empty: default_horizons(min_window / 8)
};

struct EdgeStep {
  long long i = 0;
  IVec z_i;
  double lambda = 0;
  double length = 0;
  bool certified = false;
  size_t shift = 0;  // rotation applied so that u_i is minimal at the start
};

struct EdgeRay {
  int edge_id = -1;
  RVec x, y, z, eta;  // x, y ordered so that <eta,x> < 0 < <eta,y>
  int ell = 0;
  std::vector<EdgeStep> log;
  GeodesicTrace trace;
  bool converged = false;
  double forward_length = 0, backward_length = 0;  // stabilized window
  std::string note;
};

RVec default_eta(const RVec& x, const RVec& y, const RVec& z);

EdgeRay discrete_minimal_ray_from_edge(HomologySolver& solver, const ConstantsLedger& ledger, const SymPolytope& poly,
                                       int edge_id, const RVec& z, const RVec& eta, const EdgeRayOptions& opt = {});

struct AsymptotePoint {
  RVec v;
  double radius = 0;
};

struct AsymptoteSet {
  std::vector<AsymptotePoint> plus, minus, mixed;
  std::vector<double> horizons;
  std::vector<RVec> plus_samples, minus_samples;  // one per horizon after the first
};

// Reference time t0 = horizons[0]; forward samples (P(T) - P(t0)) / (T - t0),
// backward samples (P(-t0) - P(-T)) / (T - t0), mixed (P(T) - P(-S)) / (T + S),
// clustered by complete linkage at `cluster_radius`. Only the later half of
// the samples is clustered; all of them are kept for inspection.
AsymptoteSet asymptotes(const GeodesicTrace& tr, const std::vector<double>& horizons, double cluster_radius = 0.05);
std::vector<double> default_horizons(double T = 1.0);
// Mixed points within combined radii of a segment between plus and minus points.
bool mixed_in_convjoin(const AsymptoteSet& a, double slack);

struct RotationVector {
  RVec R;
  RVec h;
  double defect = 0;  // |R - h/(t-s)|
};
RotationVector rotation_vector(const GeodesicTrace& tr, double s, double t,
                               const std::function<double(const RVec&)>& norm);

struct GeodesicClassification {
  bool refused = false;
  std::string reason;
  bool homoclinic = false, heteroclinic = false, diverging = false, semi_converging = false;
  bool exposed = false, semi_exposed = false, non_homoclinic = false;
  int plus_vertex = -1, minus_vertex = -1;  // matched polytope vertices
  double sphere_defect = 0;  // max |gauge - 1| over asymptote points
  std::vector<std::string> labels;
  std::string summary() const;
};

GeodesicClassification classify(const AsymptoteSet& a, const SymPolytope& poly, double tol = 0.05);
double polytope_gauge(const SymPolytope& poly, const RVec& v);

struct Symbol {
  int highway = -1;
  int orientation = 1;
  double t_start = 0, t_end = 0;
};
struct SymbolSequence {
  std::vector<Symbol> symbols;  // one per lap
  bool empty_flag = false;
};
// Laps along highways from tube-membership runs lasting at least dwell_min
// (<= 0: three tube crossing times).
SymbolSequence symbol_sequence(const GeodesicTrace& tr, const HedlundSpec& spec, double dwell_min = 0);
std::string symbol_string(const SymbolSequence& s);

struct EdgePair {
  EdgeRay a, b;
  GeodesicClassification ca, cb;
  bool used_fallback = false;
  bool distinguishable = false;
};
// Rays for (z, eta) and (z, -eta); when they come out as the same homoclinic
// ray, the second is redone from z'' = (z + y) / 2.
EdgePair construct_edge_pair(HomologySolver& solver, const ConstantsLedger& ledger, const SymPolytope& poly,
                             int edge_id, const EdgeRayOptions& opt = {}, double tol = 0.05);

std::string trace_csv(const GeodesicTrace& tr);

}  // namespace sn
