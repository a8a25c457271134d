#include "stablenorm/periodic_space.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>

namespace sn {

PeriodicSpace::PeriodicSpace(int rank, int dim) : rank_(rank), dim_(dim) {
  if (rank < 1) throw std::invalid_argument("rank must be >= 1");
  if (dim < 0) throw std::invalid_argument("dimension must be >= 0");
}

int PeriodicSpace::add_vertex(const RVec& position) {
  if ((int)position.size() != dim_) throw std::invalid_argument("vertex position has wrong dimension");
  if (dim_ == 0) {
    // keep a one-slot placeholder per vertex so num_vertices() works
    pos_.push_back(0.0);
  } else {
    pos_.insert(pos_.end(), position.begin(), position.end());
  }
  return num_vertices() - 1;
}

int PeriodicSpace::add_edge_pair(int u, int v, double length, const IVec& label) {
  if ((int)label.size() != rank_) throw std::invalid_argument("edge label has wrong rank");
  if (!(length > 0) || !std::isfinite(length)) throw std::invalid_argument("edge length must be positive");
  int n = num_vertices();
  if (u < 0 || v < 0 || u >= n || v >= n) throw std::invalid_argument("edge endpoint out of range");
  if (edges_.size() + 2 > kMaxEdges) throw std::length_error("edge count exceeds the memory guard");
  check_coords(label);
  int e = (int)edges_.size();
  edges_.push_back({u, v, length, e + 1});
  edges_.push_back({v, u, length, e});
  labels_.insert(labels_.end(), label.begin(), label.end());
  for (long long c : label) labels_.push_back(-c);
  return e;
}

void PeriodicSpace::finalize(int basepoint) {
  int n = num_vertices();
  if (n == 0) throw std::invalid_argument("space has no vertices");
  if (basepoint < 0 || basepoint >= n) throw std::invalid_argument("basepoint out of range");
  basepoint_ = basepoint;
  adj_start_.assign(n + 1, 0);
  for (const auto& e : edges_) ++adj_start_[e.u + 1];
  for (int i = 0; i < n; ++i) adj_start_[i + 1] += adj_start_[i];
  adj_.assign(edges_.size(), 0);
  std::vector<int> fill(adj_start_.begin(), adj_start_.end() - 1);
  for (int e = 0; e < (int)edges_.size(); ++e) adj_[fill[edges_[e].u]++] = e;
  // reverse-edge invariant
  for (int e = 0; e < (int)edges_.size(); ++e) {
    const Edge& a = edges_[e];
    const Edge& b = edges_[a.reverse];
    if (b.u != a.v || b.v != a.u || b.length != a.length || b.reverse != e)
      throw std::logic_error("reverse edge invariant broken");
    for (int k = 0; k < rank_; ++k)
      if (label_ptr(e)[k] != -label_ptr(a.reverse)[k]) throw std::logic_error("reverse label invariant broken");
  }
  // connectivity
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    for (const int* p = out_begin(x); p != out_end(x); ++p) {
      int y = edges_[*p].v;
      if (!seen[y]) {
        seen[y] = 1;
        ++count;
        stack.push_back(y);
      }
    }
  }
  if (count != n) throw std::invalid_argument("graph is not connected");
}

IVec PeriodicSpace::label(int e) const {
  const long long* p = label_ptr(e);
  return IVec(p, p + rank_);
}

RVec PeriodicSpace::position(int v) const {
  if (dim_ == 0) return {};
  const double* p = position_ptr(v);
  return RVec(p, p + dim_);
}

RVec PeriodicSpace::cover_displacement(int e) const {
  const Edge& ed = edges_[e];
  RVec d(rank_);
  const long long* l = label_ptr(e);
  for (int k = 0; k < rank_; ++k) d[k] = double(l[k]);
  if (has_cover_positions()) {
    const double* pu = position_ptr(ed.u);
    const double* pv = position_ptr(ed.v);
    for (int k = 0; k < rank_; ++k) d[k] += pv[k] - pu[k];
  }
  return d;
}

// ----------------------------------------------------------------------------

static std::vector<IVec> stencil_offsets(int n, int radius) {
  std::vector<IVec> out;
  for (auto& o : primitive_vectors(n, radius))
    if (is_canonical_sign(o)) out.push_back(o);
  return out;
}

static long long floor_div(long long a, long long b) {
  long long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

static long long ipow(long long b, int e) {
  long long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// Grid vertices indexed with the first coordinate most significant, so the
// index order is the lexicographic order of grid coordinates.
struct Grid {
  int n, res;
  long long count;
  Grid(int n_, int res_) : n(n_), res(res_), count(ipow(res_, n_)) {}
  void coords(long long idx, std::vector<long long>& g) const {
    g.resize(n);
    for (int k = n - 1; k >= 0; --k) {
      g[k] = idx % res;
      idx /= res;
    }
  }
  long long index(const std::vector<long long>& g) const {
    long long idx = 0;
    for (int k = 0; k < n; ++k) idx = idx * res + g[k];
    return idx;
  }
};

template <class LengthFn>
static PeriodicSpace build_grid(int n, int resolution, int stencil_radius, LengthFn edge_length) {
  if (n < 1) throw std::invalid_argument("dimension must be >= 1");
  if (resolution < 2) throw std::invalid_argument("resolution too small to connect the torus");
  if (stencil_radius < 1) throw std::invalid_argument("stencil radius must be >= 1");
  auto offs = stencil_offsets(n, stencil_radius);
  Grid grid(n, resolution);
  double edges = 2.0 * double(grid.count) * double(offs.size());
  if (edges > double(kMaxEdges)) throw std::length_error("edge count exceeds the memory guard");
  PeriodicSpace s(n, n);
  std::vector<long long> g, h(n);
  for (long long i = 0; i < grid.count; ++i) {
    grid.coords(i, g);
    RVec p(n);
    for (int k = 0; k < n; ++k) p[k] = double(g[k]) / resolution;
    s.add_vertex(p);
  }
  IVec label(n);
  for (long long i = 0; i < grid.count; ++i) {
    grid.coords(i, g);
    for (const auto& o : offs) {
      for (int k = 0; k < n; ++k) {
        long long t = g[k] + o[k];
        label[k] = floor_div(t, resolution);
        h[k] = t - label[k] * resolution;
      }
      long long j = grid.index(h);
      double len = edge_length(g, o);
      s.add_edge_pair(int(i), int(j), len, label);
    }
  }
  return s;
}

PeriodicSpace build_flat_torus(int n, int resolution, int stencil_radius) {
  PeriodicSpace s = build_grid(n, resolution, stencil_radius,
                               [&](const std::vector<long long>&, const IVec& o) {
                                 return norm_l2(o) / resolution;
                               });
  s.finalize(0);
  s.meta["builder"] = "flat";
  s.meta["dimension"] = std::to_string(n);
  s.meta["resolution"] = std::to_string(resolution);
  s.meta["stencil"] = std::to_string(stencil_radius);
  return s;
}

// ----------------------------------------------------------------------------
// Hedlund metric

IVec highway_class(const Highway& h) {
  if (h.points.size() < 2) throw std::invalid_argument("highway needs at least two points");
  IVec c(h.points.front().size());
  for (size_t k = 0; k < c.size(); ++k) {
    double d = h.points.back()[k] - h.points.front()[k];
    double r = std::round(d);
    if (std::fabs(d - r) > 1e-9) throw std::invalid_argument("highway is not closed in the torus");
    c[k] = (long long)r;
  }
  return c;
}

double highway_euclidean_length(const Highway& h) {
  double L = 0;
  for (size_t i = 0; i + 1 < h.points.size(); ++i) {
    double s = 0;
    for (size_t k = 0; k < h.points[i].size(); ++k) {
      double d = h.points[i + 1][k] - h.points[i][k];
      s += d * d;
    }
    L += std::sqrt(s);
  }
  return L;
}

// Closest point parameter of x on segment [a,b].
static double seg_param(const RVec& a, const RVec& b, const RVec& x) {
  double num = 0, den = 0;
  for (size_t k = 0; k < a.size(); ++k) {
    double d = b[k] - a[k];
    num += (x[k] - a[k]) * d;
    den += d * d;
  }
  if (den == 0) return 0;
  return std::clamp(num / den, 0.0, 1.0);
}

// Distance from x to the periodic copies of segment [a,b]; closest point returned in c.
static double periodic_seg_distance(const RVec& a, const RVec& b, const RVec& x, double reach, RVec* c) {
  size_t n = x.size();
  std::vector<long long> lo(n), hi(n), t(n);
  for (size_t k = 0; k < n; ++k) {
    double mn = std::min(a[k], b[k]), mx = std::max(a[k], b[k]);
    lo[k] = (long long)std::ceil(x[k] - mx - reach);
    hi[k] = (long long)std::floor(x[k] - mn + reach);
    if (lo[k] > hi[k]) return INFINITY;
  }
  double best = INFINITY;
  t = lo;
  RVec xs(n);
  while (true) {
    for (size_t k = 0; k < n; ++k) xs[k] = x[k] - double(t[k]);
    double s = seg_param(a, b, xs);
    double d2 = 0;
    for (size_t k = 0; k < n; ++k) {
      double p = a[k] + s * (b[k] - a[k]);
      d2 += (xs[k] - p) * (xs[k] - p);
    }
    double d = std::sqrt(d2);
    if (d < best) {
      best = d;
      if (c) {
        c->resize(n);
        for (size_t k = 0; k < n; ++k) (*c)[k] = a[k] + s * (b[k] - a[k]) + double(t[k]);
      }
    }
    size_t k = 0;
    while (k < n && t[k] == hi[k]) {
      t[k] = lo[k];
      ++k;
    }
    if (k == n) break;
    ++t[k];
  }
  return best;
}

// Minimum distance between segments [p0,p1] and [q0,q1] by dense clamped search
// followed by alternating projection; exact enough for the disjointness check.
static double segment_segment_distance(const RVec& p0, const RVec& p1, const RVec& q0, const RVec& q1) {
  size_t n = p0.size();
  auto point = [&](const RVec& a, const RVec& b, double s) {
    RVec r(n);
    for (size_t k = 0; k < n; ++k) r[k] = a[k] + s * (b[k] - a[k]);
    return r;
  };
  auto dist = [&](const RVec& x, const RVec& y) {
    double s = 0;
    for (size_t k = 0; k < n; ++k) s += (x[k] - y[k]) * (x[k] - y[k]);
    return std::sqrt(s);
  };
  double best = INFINITY;
  const int N = 16;
  for (int i = 0; i <= N; ++i) {
    double s = double(i) / N;
    for (int it = 0; it < 60; ++it) {
      RVec ps = point(p0, p1, s);
      double t = seg_param(q0, q1, ps);
      RVec qt = point(q0, q1, t);
      double s2 = seg_param(p0, p1, qt);
      if (std::fabs(s2 - s) < 1e-15) break;
      s = s2;
    }
    RVec ps = point(p0, p1, s);
    RVec qt = point(q0, q1, seg_param(q0, q1, ps));
    best = std::min(best, dist(ps, qt));
  }
  return best;
}

static int rational_rank(std::vector<IVec> rows) {
  if (rows.empty()) return 0;
  size_t m = rows.size(), n = rows[0].size();
  std::vector<std::vector<long double>> a(m, std::vector<long double>(n));
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < n; ++j) a[i][j] = (long double)rows[i][j];
  int rank = 0;
  for (size_t col = 0; col < n && rank < (int)m; ++col) {
    size_t piv = rank;
    for (size_t i = rank; i < m; ++i)
      if (std::fabs(a[i][col]) > std::fabs(a[piv][col])) piv = i;
    if (std::fabs(a[piv][col]) < 1e-9) continue;
    std::swap(a[piv], a[rank]);
    for (size_t i = 0; i < m; ++i) {
      if (i == (size_t)rank) continue;
      long double f = a[i][col] / a[rank][col];
      for (size_t j = 0; j < n; ++j) a[i][j] -= f * a[rank][j];
    }
    ++rank;
  }
  return rank;
}

void validate_hedlund(const HedlundSpec& spec, int resolution) {
  if (spec.n < 3) throw std::invalid_argument("Hedlund construction needs dimension >= 3");
  if (spec.highways.empty()) throw std::invalid_argument("no highways given");
  std::vector<IVec> classes;
  for (size_t i = 0; i < spec.highways.size(); ++i) {
    const auto& h = spec.highways[i];
    for (const auto& p : h.points)
      if ((int)p.size() != spec.n) throw std::invalid_argument("highway point has wrong dimension");
    if (!(h.length > 0)) throw std::invalid_argument("highway length must be positive");
    if (!(h.radius > 0) || h.radius >= 0.5) throw std::invalid_argument("tube radius must lie in (0, 1/2)");
    IVec c = highway_class(h);
    if (is_zero(c)) throw std::invalid_argument("highway is null-homologous");
    classes.push_back(c);
    if (resolution > 0 && double(resolution) * h.radius < 4.0)
      throw std::invalid_argument("resolution below 4x inverse tube radius");
    if (!(spec.f_far > h.length / highway_euclidean_length(h)))
      throw std::invalid_argument("background level must exceed every highway level");
  }
  if (rational_rank(classes) < spec.n) throw std::invalid_argument("highway classes do not span the lattice");
  // pairwise tube disjointness over periodic copies
  for (size_t i = 0; i < spec.highways.size(); ++i)
    for (size_t j = i + 1; j < spec.highways.size(); ++j) {
      const auto& A = spec.highways[i];
      const auto& B = spec.highways[j];
      double need = A.radius + B.radius;
      for (size_t a = 0; a + 1 < A.points.size(); ++a)
        for (size_t b = 0; b + 1 < B.points.size(); ++b) {
          int n = spec.n;
          std::vector<long long> t(n, -2);
          while (true) {
            RVec q0 = B.points[b], q1 = B.points[b + 1];
            for (int k = 0; k < n; ++k) {
              q0[k] += double(t[k]);
              q1[k] += double(t[k]);
            }
            if (segment_segment_distance(A.points[a], A.points[a + 1], q0, q1) < need)
              throw std::invalid_argument("tubes overlap");
            int k = 0;
            while (k < n && t[k] == 2) {
              t[k] = -2;
              ++k;
            }
            if (k == n) break;
            ++t[k];
          }
        }
    }
}

static double quintic(double t) { return t * t * t * (10 + t * (-15 + 6 * t)); }
static double quintic_d(double t) { return 30 * t * t * (1 + t * (-2 + t)); }

HedlundField::HedlundField(const HedlundSpec& spec, bool with_access, const RVec& basepoint, double access_radius)
    : spec_(spec), access_(with_access), x0_(basepoint), access_r_(access_radius) {
  for (const auto& h : spec_.highways) f_center_.push_back(h.length / highway_euclidean_length(h));
  if (access_) {
    for (size_t i = 0; i < spec_.highways.size(); ++i) {
      RVec best_c;
      double best = INFINITY;
      const auto& h = spec_.highways[i];
      for (size_t a = 0; a + 1 < h.points.size(); ++a) {
        RVec c;
        double d = periodic_seg_distance(h.points[a], h.points[a + 1], x0_, 2.0, &c);
        if (d < best) {
          best = d;
          best_c = c;
        }
      }
      access_seg_.push_back({x0_, best_c});
    }
  }
}

double HedlundField::distance_to_highway(int i, const RVec& x) const {
  const auto& h = spec_.highways[i];
  double best = INFINITY;
  for (size_t a = 0; a + 1 < h.points.size(); ++a)
    best = std::min(best, periodic_seg_distance(h.points[a], h.points[a + 1], x, h.radius, nullptr));
  return best;
}

int HedlundField::tube_of(const RVec& x) const {
  for (size_t i = 0; i < spec_.highways.size(); ++i)
    if (distance_to_highway(int(i), x) < spec_.highways[i].radius) return int(i);
  return -1;
}

double HedlundField::f(const RVec& x) const {
  RVec g;
  return f_grad(x, g);
}

double HedlundField::f_grad(const RVec& x, RVec& grad) const {
  size_t n = x.size();
  grad.assign(n, 0.0);
  double f = spec_.f_far;
  for (size_t i = 0; i < spec_.highways.size(); ++i) {
    const auto& h = spec_.highways[i];
    RVec c;
    double best = INFINITY;
    for (size_t a = 0; a + 1 < h.points.size(); ++a) {
      RVec ci;
      double d = periodic_seg_distance(h.points[a], h.points[a + 1], x, h.radius, &ci);
      if (d < best) {
        best = d;
        c = ci;
      }
    }
    if (best < h.radius) {
      double t = best / h.radius;
      double span = spec_.f_far - f_center_[i];
      f = f_center_[i] + span * quintic(t);
      if (best > 0) {
        double df = span * quintic_d(t) / h.radius;
        for (size_t k = 0; k < n; ++k) grad[k] = df * (x[k] - c[k]) / best;
      }
      break;  // tubes are disjoint
    }
  }
  if (access_) {
    for (size_t i = 0; i < access_seg_.size(); ++i) {
      double d = periodic_seg_distance(access_seg_[i].first, access_seg_[i].second, x, access_r_, nullptr);
      double medium = std::sqrt(f_center_[i] * spec_.f_far);
      if (d < access_r_ && medium < f) {
        f = medium;
        grad.assign(n, 0.0);
      }
    }
  }
  return f;
}

PeriodicSpace build_hedlund_graph(const HedlundSpec& spec, int resolution) {
  validate_hedlund(spec, resolution);
  int n = spec.n;
  Grid grid(n, resolution);
  HedlundField tubes_only(spec, false);
  // basepoint: first grid vertex (lexicographically) outside every tube
  long long base = -1;
  std::vector<long long> g;
  RVec p(n);
  for (long long i = 0; i < grid.count; ++i) {
    grid.coords(i, g);
    for (int k = 0; k < n; ++k) p[k] = double(g[k]) / resolution;
    if (tubes_only.tube_of(p) < 0) {
      base = i;
      break;
    }
  }
  if (base < 0) throw std::invalid_argument("tubes cover every grid vertex");
  grid.coords(base, g);
  RVec x0(n);
  for (int k = 0; k < n; ++k) x0[k] = double(g[k]) / resolution;
  double ar = spec.access_radius > 0 ? spec.access_radius : 1.5 / resolution;
  HedlundField field(spec, true, x0, ar);

  std::vector<double> fv(grid.count);
  for (long long i = 0; i < grid.count; ++i) {
    grid.coords(i, g);
    for (int k = 0; k < n; ++k) p[k] = double(g[k]) / resolution;
    fv[i] = field.f(p);
  }
  PeriodicSpace s = build_grid(n, resolution, spec.stencil_radius, [&](const std::vector<long long>& gu, const IVec& o) {
    RVec mid(n);
    std::vector<long long> gv(n);
    for (int k = 0; k < n; ++k) {
      mid[k] = (double(gu[k]) + 0.5 * double(o[k])) / resolution;
      gv[k] = ((gu[k] + o[k]) % resolution + resolution) % resolution;
    }
    double fu = fv[grid.index(gu)], fw = fv[grid.index(gv)];
    double fm = field.f(mid);
    // Simpson rule along the straight edge
    return norm_l2(o) / resolution * (fu + 4 * fm + fw) / 6.0;
  });
  s.finalize(int(base));
  s.meta["builder"] = "hedlund";
  s.meta["dimension"] = std::to_string(n);
  s.meta["resolution"] = std::to_string(resolution);
  s.meta["stencil"] = std::to_string(spec.stencil_radius);
  return s;
}

HedlundSpec example_axis_highways(int n, double L, double radius, double f_far) {
  HedlundSpec spec;
  spec.n = n;
  spec.f_far = f_far;
  for (int i = 0; i < n; ++i) {
    int j = (i + 1) % n;
    Highway h;
    RVec a(n, 0.0), b(n, 0.0);
    a[j] = 0.5;
    b = a;
    b[i] = 1.0;
    h.points = {a, b};
    h.length = L;
    h.radius = radius;
    spec.highways.push_back(h);
  }
  return spec;
}

// ----------------------------------------------------------------------------

ShortestPathTree dijkstra(const PeriodicSpace& s, int source) {
  return dijkstra(s, std::vector<int>{source});
}

ShortestPathTree dijkstra(const PeriodicSpace& s, const std::vector<int>& sources) {
  int n = s.num_vertices();
  ShortestPathTree t;
  t.dist.assign(n, INFINITY);
  t.parent_edge.assign(n, -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (int source : sources) {
    t.dist[source] = 0;
    pq.push({0.0, source});
  }
  while (!pq.empty()) {
    auto [d, x] = pq.top();
    pq.pop();
    if (d > t.dist[x]) continue;
    for (const int* p = s.out_begin(x); p != s.out_end(x); ++p) {
      const Edge& e = s.edge(*p);
      double nd = d + e.length;
      if (nd < t.dist[e.v]) {
        t.dist[e.v] = nd;
        t.parent_edge[e.v] = *p;
        pq.push({nd, e.v});
      }
    }
  }
  return t;
}

std::vector<int> tree_path(const PeriodicSpace& s, const ShortestPathTree& t, int target) {
  std::vector<int> path;
  int x = target;
  while (t.parent_edge[x] >= 0) {
    int e = t.parent_edge[x];
    path.push_back(e);
    x = s.edge(e).u;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

double quotient_diameter(const PeriodicSpace& s) {
  constexpr double kDiameterRelTol = 1e-9;
  int n = s.num_vertices();
  std::vector<double> lo(n, 0.0), hi(n, INFINITY);
  std::vector<char> active(n, 1);
  double best = 0.0;
  int remaining = n;
  bool pick_high = true;
  while (remaining > 0) {
    int v = -1;
    for (int i = 0; i < n; ++i) {
      if (!active[i]) continue;
      if (v < 0) v = i;
      else if (pick_high ? hi[i] > hi[v] : lo[i] < lo[v]) v = i;
    }
    pick_high = !pick_high;
    auto t = dijkstra(s, v);
    double ecc = *std::max_element(t.dist.begin(), t.dist.end());
    best = std::max(best, ecc);
    for (int w = 0; w < n; ++w) {
      if (!active[w]) continue;
      double d = t.dist[w];
      lo[w] = std::max({lo[w], d, ecc - d});
      hi[w] = std::min(hi[w], ecc + d);
    }
    active[v] = 0;
    --remaining;
    for (int w = 0; w < n; ++w) {
      if (!active[w]) continue;
      // near-ties are common (the far region is flat), so allow a relative slack
      if (hi[w] <= best * (1 + kDiameterRelTol) || lo[w] == hi[w]) {
        best = std::max(best, lo[w] == hi[w] ? lo[w] : best);
        active[w] = 0;
        --remaining;
      }
    }
  }
  return best;
}

IVec lift_path(const PeriodicSpace& s, const std::vector<int>& walk) {
  IVec h(s.rank(), 0);
  for (size_t i = 0; i < walk.size(); ++i) {
    if (walk[i] < 0 || walk[i] >= s.num_edges()) throw std::invalid_argument("edge index out of range");
    if (i > 0 && s.edge(walk[i - 1]).v != s.edge(walk[i]).u) throw std::invalid_argument("disconnected step in walk");
    const long long* l = s.label_ptr(walk[i]);
    for (int k = 0; k < s.rank(); ++k) h[k] += l[k];
  }
  return h;
}

double walk_length(const PeriodicSpace& s, const std::vector<int>& walk) {
  double L = 0;
  for (int e : walk) L += s.edge(e).length;
  return L;
}

std::vector<int> reverse_walk(const PeriodicSpace& s, const std::vector<int>& walk) {
  std::vector<int> r;
  r.reserve(walk.size());
  for (auto it = walk.rbegin(); it != walk.rend(); ++it) r.push_back(s.edge(*it).reverse);
  return r;
}

bool is_closed_walk(const PeriodicSpace& s, const std::vector<int>& walk) {
  if (walk.empty()) return true;
  for (size_t i = 0; i + 1 < walk.size(); ++i)
    if (s.edge(walk[i]).v != s.edge(walk[i + 1]).u) return false;
  return s.edge(walk.back()).v == s.edge(walk.front()).u;
}

}  // namespace sn
