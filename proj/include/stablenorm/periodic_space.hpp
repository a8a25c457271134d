#pragma once

#include <map>
#include <string>
#include <vector>

#include "stablenorm/lattice.hpp"

namespace sn {

struct Edge {
  int u = 0, v = 0;
  double length = 0.0;
  int reverse = -1;  // index of the edge (v, u, length, -label)
};

// Fundamental-domain graph of a periodic metric space. Edge labels are the
// homology displacements picked up when the edge is lifted to the cover.
class PeriodicSpace {
 public:
  PeriodicSpace() = default;
  PeriodicSpace(int rank, int dim);

  int rank() const { return rank_; }
  int dim() const { return dim_; }
  int num_vertices() const { return int(pos_.size() / std::max(dim_, 1)); }
  int num_edges() const { return int(edges_.size()); }

  int add_vertex(const RVec& position);
  // Adds (u,v,len,label) and its reverse; returns the index of the forward edge.
  int add_edge_pair(int u, int v, double length, const IVec& label);
  void finalize(int basepoint);  // builds adjacency, validates

  const Edge& edge(int e) const { return edges_[e]; }
  const long long* label_ptr(int e) const { return &labels_[size_t(e) * rank_]; }
  IVec label(int e) const;
  RVec position(int v) const;
  const double* position_ptr(int v) const { return &pos_[size_t(v) * dim_]; }

  // Outgoing edges of v, sorted by edge index.
  const int* out_begin(int v) const { return &adj_[adj_start_[v]]; }
  const int* out_end(int v) const { return &adj_[adj_start_[v + 1]]; }

  int basepoint() const { return basepoint_; }

  // Positions live in the unit cube and the lattice is Z^n, so an edge's
  // displacement in the cover is pos(v) - pos(u) + label.
  bool has_cover_positions() const { return dim_ == rank_ && dim_ > 0; }
  RVec cover_displacement(int e) const;

  std::map<std::string, std::string> meta;  // free-form builder description

 private:
  int rank_ = 0, dim_ = 0;
  std::vector<double> pos_;
  std::vector<Edge> edges_;
  std::vector<long long> labels_;
  std::vector<int> adj_start_, adj_;
  int basepoint_ = 0;
};

struct ConstantsLedger {
  double diam = 0.0;
  double J = 0.0;
  double K = 0.0;
  double D = 0.0;
  double k_radius = 0.0;       // stable radius of the enumerated ball
  size_t k_points = 0;         // lattice points enumerated for K
  bool k_certified = true;     // every N(y) in the ball came from a certified search
  static double assemble(int rank, double diam, double K) { return (rank + 5) * diam + 2.0 * K; }
  bool consistent(int rank) const { return D == assemble(rank, diam, K); }
};

// Builders -------------------------------------------------------------------

constexpr size_t kMaxEdges = 10'000'000;

// Offsets: primitive integer vectors with sup-norm <= stencil_radius. Radius 1
// is the 3^n-1 neighbourhood.
PeriodicSpace build_flat_torus(int n, int resolution, int stencil_radius = 2);

struct Highway {
  std::vector<RVec> points;  // polyline in R^n; last - first is an integer vector
  double length = 1.0;       // target length L_i of the closed curve
  double radius = 0.1;       // tube radius r_i
};

struct HedlundSpec {
  int n = 3;
  std::vector<Highway> highways;
  double f_far = 3.0;
  double access_radius = 0.0;  // 0: one grid cell
  int stencil_radius = 1;
};

IVec highway_class(const Highway& h);
double highway_euclidean_length(const Highway& h);
// Throws std::invalid_argument with a description when a precondition fails.
void validate_hedlund(const HedlundSpec& spec, int resolution);

// Conformal factor of the discretized Hedlund metric at a point of the torus.
// With access paths it is the graph's factor; without, it is smooth (C^2).
class HedlundField {
 public:
  HedlundField(const HedlundSpec& spec, bool with_access, const RVec& basepoint = {}, double access_radius = 0.0);
  double f(const RVec& x) const;
  // value and gradient of f
  double f_grad(const RVec& x, RVec& grad) const;
  // Index of the tube containing x, -1 if none.
  int tube_of(const RVec& x) const;
  double distance_to_highway(int i, const RVec& x) const;
  const HedlundSpec& spec() const { return spec_; }

 private:
  HedlundSpec spec_;
  bool access_;
  RVec x0_;
  double access_r_;
  std::vector<double> f_center_;
  std::vector<std::pair<RVec, RVec>> access_seg_;  // per highway: x0 -> nearest point
};

PeriodicSpace build_hedlund_graph(const HedlundSpec& spec, int resolution);

// Three axis circles offset by half a period: tau_i(t) = t e_i + e_{j(i)}/2
// with j = (2,3,1) in T^3 (and cyclically in higher dimensions).
HedlundSpec example_axis_highways(int n, double L = 1.0, double radius = 0.2, double f_far = 3.0);

// Graph utilities --------------------------------------------------------------

struct ShortestPathTree {
  std::vector<double> dist;
  std::vector<int> parent_edge;  // -1 at the source
};
ShortestPathTree dijkstra(const PeriodicSpace& s, int source);
ShortestPathTree dijkstra(const PeriodicSpace& s, const std::vector<int>& sources);
std::vector<int> tree_path(const PeriodicSpace& s, const ShortestPathTree& t, int target);

// Diameter of the quotient graph via eccentricity bounds, exact up to a
// relative 1e-9 (vertices within that of the current best are pruned).
double quotient_diameter(const PeriodicSpace& s);

IVec lift_path(const PeriodicSpace& s, const std::vector<int>& walk);
double walk_length(const PeriodicSpace& s, const std::vector<int>& walk);
std::vector<int> reverse_walk(const PeriodicSpace& s, const std::vector<int>& walk);
bool is_closed_walk(const PeriodicSpace& s, const std::vector<int>& walk);

}  // namespace sn
