#include "stablenorm/convex_poly.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sn {

namespace {

using Bits = std::vector<uint64_t>;

bool bit(const Bits& b, size_t i) { return (b[i >> 6] >> (i & 63)) & 1ULL; }
void set_bit(Bits& b, size_t i) { b[i >> 6] |= 1ULL << (i & 63); }
size_t popcount(const Bits& b) {
  size_t c = 0;
  for (auto w : b) c += __builtin_popcountll(w);
  return c;
}
Bits and_bits(const Bits& a, const Bits& b) {
  Bits r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] & b[i];
  return r;
}
bool subset(const Bits& a, const Bits& b) {  // a within b
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] & ~b[i]) return false;
  return true;
}

// Arithmetic policy: exact rationals or doubles with a tolerance.
struct ExactNum {
  using T = Rational;
  static int sgn(const T& v, double) { return v.sign(); }
  static T abs(const T& v) { return boost::multiprecision::abs(v); }
  static double to_double(const T& v) { return v.convert_to<double>(); }
};
struct FloatNum {
  using T = double;
  static int sgn(double v, double eps) { return v > eps ? 1 : (v < -eps ? -1 : 0); }
  static double abs(double v) { return std::fabs(v); }
  static double to_double(double v) { return v; }
};

// Row-reduces `v` against an echelon basis; returns true and appends when independent.
template <class Num>
bool add_if_independent(std::vector<std::vector<typename Num::T>>& basis, std::vector<int>& pivots,
                        std::vector<typename Num::T> v, double eps) {
  using T = typename Num::T;
  for (size_t i = 0; i < basis.size(); ++i) {
    int p = pivots[i];
    if (Num::sgn(v[p], eps) == 0) continue;
    T f = v[p] / basis[i][p];
    for (size_t k = 0; k < v.size(); ++k) v[k] -= f * basis[i][k];
  }
  int piv = -1;
  double best = 0;
  for (size_t k = 0; k < v.size(); ++k) {
    double a = std::fabs(Num::to_double(v[k]));
    if (Num::sgn(v[k], eps) != 0 && a > best) {
      best = a;
      piv = (int)k;
    }
  }
  if (piv < 0) return false;
  basis.push_back(std::move(v));
  pivots.push_back(piv);
  return true;
}

template <class Num>
int rank_of(const std::vector<std::vector<typename Num::T>>& vs, double eps) {
  std::vector<std::vector<typename Num::T>> basis;
  std::vector<int> piv;
  for (const auto& v : vs) add_if_independent<Num>(basis, piv, v, eps);
  return (int)basis.size();
}

// Solves B x = e_j (B square, invertible) by Gauss-Jordan.
template <class Num>
std::vector<std::vector<typename Num::T>> inverse_columns(std::vector<std::vector<typename Num::T>> B) {
  using T = typename Num::T;
  int d = (int)B.size();
  std::vector<std::vector<T>> I(d, std::vector<T>(d, T(0)));
  for (int i = 0; i < d; ++i) I[i][i] = T(1);
  for (int c = 0; c < d; ++c) {
    int p = c;
    for (int r = c + 1; r < d; ++r)
      if (Num::to_double(Num::abs(B[r][c])) > Num::to_double(Num::abs(B[p][c]))) p = r;
    std::swap(B[c], B[p]);
    std::swap(I[c], I[p]);
    T inv = T(1) / B[c][c];
    for (int k = 0; k < d; ++k) {
      B[c][k] *= inv;
      I[c][k] *= inv;
    }
    for (int r = 0; r < d; ++r) {
      if (r == c || B[r][c] == T(0)) continue;
      T f = B[r][c];
      for (int k = 0; k < d; ++k) {
        B[r][k] -= f * B[c][k];
        I[r][k] -= f * I[c][k];
      }
    }
  }
  // column j of the inverse
  std::vector<std::vector<T>> cols(d, std::vector<T>(d));
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) cols[j][i] = I[i][j];
  return cols;
}

template <class Num>
struct RayRec {
  std::vector<typename Num::T> x;
  Bits zero;
};

template <class Num>
void normalize_ray(std::vector<typename Num::T>& x) {
  using T = typename Num::T;
  T s = Num::abs(x[0]);
  if (Num::to_double(s) == 0) {
    s = T(0);
    for (auto& c : x)
      if (Num::to_double(Num::abs(c)) > Num::to_double(s)) s = Num::abs(c);
  }
  if (Num::to_double(s) == 0) return;
  for (auto& c : x) c /= s;
}

// Double description for the cone {(t,y) : t - <p,y> >= 0 for all p}; its
// extreme rays are the facets of conv(P) for symmetric spanning P.
template <class Num>
SymPolytope hull_impl(const std::vector<std::vector<typename Num::T>>& pts, int n, double eps,
                      std::vector<size_t>* vertex_rows = nullptr,
                      std::vector<std::vector<typename Num::T>>* facet_normals = nullptr) {
  using T = typename Num::T;
  const int d = n + 1;
  const size_t N = pts.size();
  const size_t words = (N + 63) / 64;
  std::vector<std::vector<T>> rows(N, std::vector<T>(d));
  for (size_t i = 0; i < N; ++i) {
    rows[i][0] = T(1);
    for (int k = 0; k < n; ++k) rows[i][k + 1] = -pts[i][k];
  }
  // initial basis
  std::vector<std::vector<T>> basis;
  std::vector<int> piv;
  std::vector<size_t> chosen;
  for (size_t i = 0; i < N && (int)chosen.size() < d; ++i)
    if (add_if_independent<Num>(basis, piv, rows[i], eps)) chosen.push_back(i);
  if ((int)chosen.size() < d)
    throw std::invalid_argument("degenerate point set: spans dimension " + std::to_string(chosen.size() - 1) + " < " +
                                std::to_string(n));
  std::vector<std::vector<T>> B;
  for (size_t i : chosen) B.push_back(rows[i]);
  auto cols = inverse_columns<Num>(B);
  std::vector<char> processed(N, 0);
  std::vector<RayRec<Num>> rays;
  for (int j = 0; j < d; ++j) {
    RayRec<Num> r{cols[j], Bits(words, 0)};
    normalize_ray<Num>(r.x);
    for (int i = 0; i < d; ++i)
      if (i != j) set_bit(r.zero, chosen[i]);
    rays.push_back(std::move(r));
  }
  for (size_t i : chosen) processed[i] = 1;

  auto dotrow = [&](const std::vector<T>& a, const std::vector<T>& x) {
    T s = T(0);
    for (int k = 0; k < d; ++k) s += a[k] * x[k];
    return s;
  };
  auto tol = [&](const std::vector<T>& a, const std::vector<T>& x) {
    double ma = 0, mx = 0;
    for (int k = 0; k < d; ++k) {
      ma = std::max(ma, std::fabs(Num::to_double(a[k])));
      mx = std::max(mx, std::fabs(Num::to_double(x[k])));
    }
    return eps * std::max(1.0, ma * mx);
  };

  for (size_t i = 0; i < N; ++i) {
    if (processed[i]) continue;
    processed[i] = 1;
    const auto& a = rows[i];
    std::vector<T> val(rays.size());
    std::vector<int> sg(rays.size());
    for (size_t r = 0; r < rays.size(); ++r) {
      val[r] = dotrow(a, rays[r].x);
      sg[r] = Num::sgn(val[r], tol(a, rays[r].x));
    }
    std::vector<RayRec<Num>> next;
    for (size_t r = 0; r < rays.size(); ++r) {
      if (sg[r] < 0) continue;
      RayRec<Num> keep = rays[r];
      if (sg[r] == 0) set_bit(keep.zero, i);
      next.push_back(std::move(keep));
    }
    for (size_t p = 0; p < rays.size(); ++p) {
      if (sg[p] <= 0) continue;
      for (size_t q = 0; q < rays.size(); ++q) {
        if (sg[q] >= 0) continue;
        Bits common = and_bits(rays[p].zero, rays[q].zero);
        if ((int)popcount(common) < d - 2) continue;
        bool adjacent = true;
        for (size_t r = 0; r < rays.size() && adjacent; ++r)
          if (r != p && r != q && subset(common, rays[r].zero)) adjacent = false;
        if (!adjacent) continue;
        RayRec<Num> nr;
        nr.x.resize(d);
        for (int k = 0; k < d; ++k) nr.x[k] = val[p] * rays[q].x[k] - val[q] * rays[p].x[k];
        normalize_ray<Num>(nr.x);
        nr.zero = common;
        set_bit(nr.zero, i);
        next.push_back(std::move(nr));
      }
    }
    rays = std::move(next);
  }

  // facets (all rays have t > 0 for a symmetric spanning set)
  SymPolytope P;
  P.n = n;
  std::vector<std::vector<T>> normals;
  std::vector<Bits> facet_rows;
  for (auto& r : rays) {
    if (Num::sgn(r.x[0], eps) <= 0) throw std::logic_error("hull: unbounded polar cone");
    std::vector<T> y(n);
    for (int k = 0; k < n; ++k) y[k] = r.x[k + 1] / r.x[0];
    normals.push_back(y);
    facet_rows.push_back(r.zero);
  }
  // vertices: points whose incident facet normals span R^n
  std::vector<int> vid(N, -1);
  std::vector<size_t> vpts;
  for (size_t i = 0; i < N; ++i) {
    std::vector<std::vector<T>> inc;
    for (size_t f = 0; f < normals.size(); ++f)
      if (bit(facet_rows[f], i)) inc.push_back(normals[f]);
    if ((int)inc.size() >= n && rank_of<Num>(inc, eps) == n) {
      vid[i] = (int)vpts.size();
      vpts.push_back(i);
    }
  }
  for (size_t i : vpts) {
    RVec v(n);
    for (int k = 0; k < n; ++k) v[k] = Num::to_double(pts[i][k]);
    P.vertices.push_back(v);
  }
  const int V = (int)vpts.size();
  std::vector<Bits> vf(V, Bits((normals.size() + 63) / 64, 0));  // facets per vertex
  for (size_t f = 0; f < normals.size(); ++f) {
    Facet F;
    for (size_t i : vpts)
      if (bit(facet_rows[f], i)) {
        F.vertices.push_back(vid[i]);
        set_bit(vf[vid[i]], f);
      }
    F.normal.resize(n);
    for (int k = 0; k < n; ++k) F.normal[k] = Num::to_double(normals[f][k]);
    P.facets.push_back(std::move(F));
  }
  // edges: smallest face containing u and v has exactly those two vertices
  for (int u = 0; u < V; ++u)
    for (int v = u + 1; v < V; ++v) {
      Bits common = and_bits(vf[u], vf[v]);
      if (popcount(common) == 0) continue;
      bool only = true;
      for (int w = 0; w < V && only; ++w)
        if (w != u && w != v && subset(common, vf[w])) only = false;
      if (only) P.edges.push_back({u, v});
    }
  P.simplicial = true;
  for (auto& F : P.facets)
    if ((int)F.vertices.size() != n) P.simplicial = false;
  P.nonempty_interior = true;
  if (vertex_rows) *vertex_rows = vpts;
  if (facet_normals) *facet_normals = normals;
  return P;
}

void fill_antipodes(SymPolytope& P, double eps) {
  int V = (int)P.vertices.size();
  P.antipode.assign(V, -1);
  for (int i = 0; i < V; ++i)
    for (int j = 0; j < V; ++j) {
      bool match;
      if (P.exact) {
        match = true;
        for (int k = 0; k < P.n && match; ++k) match = (P.vertices_exact[i][k] == -P.vertices_exact[j][k]);
      } else {
        double m = 0;
        for (int k = 0; k < P.n; ++k) m = std::max(m, std::fabs(P.vertices[i][k] + P.vertices[j][k]));
        match = m <= eps;
      }
      if (match) {
        P.antipode[i] = j;
        break;
      }
    }
}

}  // namespace

SymPolytope hull_symmetric_exact(const std::vector<QVec>& points) {
  if (points.empty()) throw std::invalid_argument("no points");
  int n = (int)points.front().size();
  std::set<QVec> uniq;
  for (const auto& p : points) {
    if ((int)p.size() != n) throw std::invalid_argument("rank mismatch");
    bool zero = std::all_of(p.begin(), p.end(), [](const Rational& c) { return c == 0; });
    if (zero) continue;
    QVec m(n);
    for (int k = 0; k < n; ++k) m[k] = -p[k];
    uniq.insert(p);
    uniq.insert(m);
  }
  std::vector<QVec> pts(uniq.begin(), uniq.end());
  if ((int)pts.size() < 2 * n) throw std::invalid_argument("degenerate point set: fewer than 2n points");
  std::vector<size_t> vrows;
  std::vector<QVec> normals;
  SymPolytope P = hull_impl<ExactNum>(pts, n, 0.0, &vrows, &normals);
  P.exact = true;
  for (size_t i : vrows) P.vertices_exact.push_back(pts[i]);
  for (size_t f = 0; f < P.facets.size(); ++f) P.facets[f].normal_exact = normals[f];
  fill_antipodes(P, 0.0);
  return P;
}

SymPolytope hull_symmetric_int(const std::vector<IVec>& points) {
  std::vector<QVec> q;
  for (const auto& p : points) {
    QVec v;
    for (long long c : p) v.emplace_back(c);
    q.push_back(std::move(v));
  }
  return hull_symmetric_exact(q);
}

SymPolytope hull_symmetric(const std::vector<RVec>& points, const HullOptions& opt) {
  if (points.empty()) throw std::invalid_argument("no points");
  int n = (int)points.front().size();
  for (const auto& p : points)
    for (double c : p)
      if (!std::isfinite(c)) throw std::invalid_argument("non-finite coordinate");
  bool exact = !opt.force_float && 2 * points.size() <= opt.exact_point_limit && n <= opt.exact_rank_limit;
  if (exact) {
    std::vector<QVec> q;
    for (const auto& p : points) {
      if ((int)p.size() != n) throw std::invalid_argument("rank mismatch");
      QVec v;
      for (double c : p) v.emplace_back(c);  // doubles are exact rationals
      q.push_back(std::move(v));
    }
    return hull_symmetric_exact(q);
  }
  // float path: dedupe within eps
  std::vector<RVec> pts;
  for (const auto& p : points) {
    if ((int)p.size() != n) throw std::invalid_argument("rank mismatch");
    if (norm_l2(p) <= opt.float_eps) continue;
    for (int s : {1, -1}) {
      RVec v = p;
      for (auto& c : v) c *= s;
      bool dup = false;
      for (const auto& w : pts) {
        double m = 0;
        for (int k = 0; k < n; ++k) m = std::max(m, std::fabs(w[k] - v[k]));
        if (m <= opt.float_eps) {
          dup = true;
          break;
        }
      }
      if (!dup) pts.push_back(v);
    }
  }
  if ((int)pts.size() < 2 * n) throw std::invalid_argument("degenerate point set: fewer than 2n points");
  SymPolytope P = hull_impl<FloatNum>(pts, n, opt.float_eps);
  P.exact = false;
  fill_antipodes(P, 10 * opt.float_eps);
  return P;
}

SymPolytope cross_polytope(int n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  std::vector<IVec> pts;
  for (int k = 0; k < n; ++k) {
    IVec e(n, 0);
    e[k] = 1;
    pts.push_back(e);
  }
  return hull_symmetric_int(pts);
}

long long edge_vertex_bound(int n) {
  long long a = (long long)n * n + 2LL * n + 1, b = 2LL * n * n - n;
  return std::min(a, b);
}

BoundReport check_bound(const SymPolytope& p) {
  if (!p.nonempty_interior) throw std::invalid_argument("polytope has empty interior");
  BoundReport r;
  r.n = p.n;
  r.V = (long long)p.vertices.size();
  r.E = (long long)p.edges.size();
  if (r.V % 2 != 0) throw std::logic_error("symmetric polytope with an odd vertex count");
  r.half_V_plus_E = r.V / 2 + r.E;
  r.bound = edge_vertex_bound(p.n);
  r.simplicial = p.simplicial;
  r.satisfied = r.half_V_plus_E >= r.bound;
  return r;
}

std::string bound_csv_header() { return "n,V,E,half_V_plus_E,bound,satisfied,branch"; }

std::string bound_csv_row(const BoundReport& r) {
  std::ostringstream os;
  os << r.n << ',' << r.V << ',' << r.E << ',' << r.half_V_plus_E << ',' << r.bound << ','
     << (r.satisfied ? "true" : "false") << ',' << (r.simplicial ? "simplicial" : "non-simplicial");
  return os.str();
}

std::vector<MinTableRow> min_table(int n_max) {
  if (n_max < 1 || n_max > 6) throw std::invalid_argument("n_max must be in 1..6");
  std::vector<MinTableRow> t;
  for (int b = 1; b <= n_max; ++b) {
    MinTableRow r;
    r.b = b;
    r.lower_bound = edge_vertex_bound(b);
    r.cross_polytope = b + 2LL * b * (b - 1);
    r.literature_edges = b < 4 ? -1 : (b % 2 == 0 ? (long long)b * (b + 2) : (long long)b * (b + 2) - 1);
    t.push_back(r);
  }
  return t;
}

std::vector<std::string> check_invariants(const SymPolytope& p) {
  std::vector<std::string> bad;
  const int V = (int)p.vertices.size();
  for (int i = 0; i < V; ++i)
    if (i >= (int)p.antipode.size() || p.antipode[i] < 0) bad.push_back("vertex " + std::to_string(i) + " has no antipode");
  if (!bad.empty()) return bad;
  std::set<std::pair<int, int>> E(p.edges.begin(), p.edges.end());
  for (auto [u, v] : p.edges) {
    int a = p.antipode[u], b = p.antipode[v];
    if (!E.count({std::min(a, b), std::max(a, b)})) bad.push_back("edge set not closed under negation");
  }
  std::vector<int> deg(V, 0);
  for (auto [u, v] : p.edges) ++deg[u], ++deg[v];
  if (p.nonempty_interior && p.n >= 2)  // a segment has no edges in this count
    for (int i = 0; i < V; ++i)
      if (deg[i] < p.n) bad.push_back("vertex " + std::to_string(i) + " has degree " + std::to_string(deg[i]) + " < n");
  std::set<std::vector<int>> F;
  for (const auto& f : p.facets) F.insert(f.vertices);
  for (const auto& f : p.facets) {
    std::vector<int> m;
    for (int v : f.vertices) m.push_back(p.antipode[v]);
    std::sort(m.begin(), m.end());
    if (!F.count(m)) bad.push_back("facet set not closed under negation");
    std::vector<int> both;
    std::set_intersection(f.vertices.begin(), f.vertices.end(), m.begin(), m.end(), std::back_inserter(both));
    if (!both.empty()) bad.push_back("facet shares a vertex with its negation");
  }
  // each edge is cut out by the facets through it
  if (p.n >= 2)
    for (auto [u, v] : p.edges) {
      std::vector<const Facet*> through;
      for (const auto& f : p.facets)
        if (std::binary_search(f.vertices.begin(), f.vertices.end(), u) &&
            std::binary_search(f.vertices.begin(), f.vertices.end(), v))
          through.push_back(&f);
      if ((int)through.size() < std::max(1, p.n - 1)) {
        bad.push_back("edge in too few facets");
        continue;
      }
      std::vector<int> inter = through.front()->vertices;
      for (auto* f : through) {
        std::vector<int> t;
        std::set_intersection(inter.begin(), inter.end(), f->vertices.begin(), f->vertices.end(), std::back_inserter(t));
        inter = t;
      }
      if (inter != std::vector<int>{u, v}) bad.push_back("edge is not the intersection of its facets");
    }
  // vertices lie on or inside every facet
  for (const auto& f : p.facets)
    for (int i = 0; i < V; ++i) {
      double s = dot(f.normal, p.vertices[i]);
      if (s > 1 + 1e-9) bad.push_back("vertex outside a facet");
    }
  return bad;
}

std::vector<IVec> random_symmetric_points(int n, int m, std::mt19937_64& rng) {
  if (n < 1 || m < n) throw std::invalid_argument("need m >= n >= 1");
  std::normal_distribution<double> g(0.0, 1.0);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<IVec> pts(m, IVec(n));
    for (auto& p : pts)
      for (auto& c : p) c = std::llround(1000.0 * g(rng));
    std::vector<std::vector<Rational>> q;
    for (auto& p : pts) {
      std::vector<Rational> v;
      for (long long c : p) v.emplace_back(c);
      q.push_back(v);
    }
    if (rank_of<ExactNum>(q, 0.0) == n) return pts;
  }
  throw std::runtime_error("could not draw a spanning point set");
}

SymPolytope merge_by_tolerance(const SymPolytope& p, double tol) {
  SymPolytope cur = p;
  bool changed = true;
  while (changed) {
    changed = false;
    const int V = (int)cur.vertices.size();
    double best = INFINITY;
    int drop = -1;
    for (int i = 0; i < V; ++i) {
      int j = cur.antipode[i];
      if (j < i) continue;
      std::vector<RVec> rest;
      for (int k = 0; k < V; ++k)
        if (k != i && k != j) rest.push_back(cur.vertices[k]);
      SymPolytope h;
      try {
        h = hull_symmetric(rest);
      } catch (const std::invalid_argument&) {
        continue;  // removing the pair would flatten the body
      }
      double out = 0;
      for (const auto& f : h.facets)
        out = std::max(out, (dot(f.normal, cur.vertices[i]) - 1.0) / norm_l2(f.normal));
      if (out < tol && out < best) {
        best = out;
        drop = i;
      }
    }
    if (drop >= 0) {
      std::vector<RVec> rest;
      int j = cur.antipode[drop];
      for (int k = 0; k < V; ++k)
        if (k != drop && k != j) rest.push_back(cur.vertices[k]);
      cur = hull_symmetric(rest);
      changed = true;
    }
  }
  return cur;
}

std::string serialize_polytope(const SymPolytope& p) {
  std::ostringstream os;
  os << "stablenorm-polytope 1\n";
  os << "rank " << p.n << " vertices " << p.vertices.size() << " edges " << p.edges.size() << " facets "
     << p.facets.size() << " exact " << (p.exact ? 1 : 0) << "\n";
  for (size_t i = 0; i < p.vertices.size(); ++i) {
    os << "v";
    if (p.exact)
      for (const auto& c : p.vertices_exact[i]) os << ' ' << c.str();
    else
      for (double c : p.vertices[i]) os << ' ' << format_vec(RVec{c});
    os << "\n";
  }
  for (auto [u, v] : p.edges) os << "e " << u << ' ' << v << "\n";
  // facets in vertex-list order, so equal polytopes serialize identically
  std::vector<const Facet*> fs;
  for (const auto& f : p.facets) fs.push_back(&f);
  std::sort(fs.begin(), fs.end(), [](const Facet* a, const Facet* b) { return a->vertices < b->vertices; });
  for (const Facet* fp : fs) {
    const Facet& f = *fp;
    os << "f " << f.vertices.size();
    for (int v : f.vertices) os << ' ' << v;
    os << " :";
    for (double c : f.normal) os << ' ' << format_vec(RVec{c});
    os << "\n";
  }
  os << "end\n";
  return os.str();
}

SymPolytope parse_polytope(const std::string& text) {
  std::istringstream is(text);
  std::string line, tok;
  while (std::getline(is, line) && !line.empty() && line[0] == '#') {
  }
  if (line != "stablenorm-polytope 1") throw std::runtime_error("not a polytope file");
  SymPolytope p;
  size_t V, E, F;
  int ex;
  std::getline(is, line);
  {
    std::istringstream ls(line);
    std::string a, b, c, d, e;
    if (!(ls >> a >> p.n >> b >> V >> c >> E >> d >> F >> e >> ex) || a != "rank")
      throw std::runtime_error("bad polytope header");
  }
  std::vector<QVec> exact;
  for (size_t i = 0; i < V; ++i) {
    std::getline(is, line);
    std::istringstream ls(line);
    ls >> tok;
    if (tok != "v") throw std::runtime_error("expected a vertex line");
    QVec q;
    RVec r;
    for (int k = 0; k < p.n; ++k) {
      ls >> tok;
      if (ex) {
        q.emplace_back(tok);
        r.push_back(q.back().convert_to<double>());
      } else {
        r.push_back(std::stod(tok));
      }
    }
    if (ex) exact.push_back(q);
    p.vertices.push_back(r);
  }
  if (ex) return hull_symmetric_exact(exact);
  return hull_symmetric(p.vertices, HullOptions{0, 0, 1e-9, true});
}

}  // namespace sn
