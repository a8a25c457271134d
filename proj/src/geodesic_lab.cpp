#include "stablenorm/geodesic_lab.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "stablenorm/splitting.hpp"

namespace sn {

namespace odeint = boost::numeric::odeint;

namespace {

struct BudgetScope {
  HomologySolver& s;
  SearchOptions saved;
  BudgetScope(HomologySolver& solver, size_t budget) : s(solver), saved(solver.options()) {
    SearchOptions o = saved;
    o.state_budget = budget;
    s.set_options(o);
  }
  ~BudgetScope() { s.set_options(saved); }
};

RVec rsub(const RVec& a, const RVec& b) {
  RVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}
RVec raxpy(const RVec& a, double s, const RVec& b) {  // a + s b
  RVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + s * b[i];
  return r;
}
RVec rscale(const RVec& a, double s) {
  RVec r(a);
  for (auto& c : r) c *= s;
  return r;
}
double dist(const RVec& a, const RVec& b) { return norm_l2(rsub(a, b)); }

double seg_dist(const RVec& p, const RVec& a, const RVec& b) {
  RVec d = rsub(b, a);
  double dd = dot(d, d);
  double s = dd > 0 ? std::clamp(dot(rsub(p, a), d) / dd, 0.0, 1.0) : 0.0;
  return dist(p, raxpy(a, s, d));
}

}  // namespace

// ---------------------------------------------------------------- metrics

ConformalTorusMetric constant_metric(int n, double c) {
  if (!(c > 0)) throw std::invalid_argument("conformal factor must be positive");
  ConformalTorusMetric g;
  g.n = n;
  g.name = "constant";
  g.f_grad = [n, c](const RVec&, RVec& grad) {
    grad.assign(n, 0.0);
    return c;
  };
  return g;
}

ConformalTorusMetric hedlund_smooth_metric(const HedlundSpec& spec) {
  auto field = std::make_shared<HedlundField>(spec, false);
  ConformalTorusMetric g;
  g.n = spec.n;
  g.name = "hedlund-smooth";
  g.f_grad = [field](const RVec& x, RVec& grad) { return field->f_grad(x, grad); };
  return g;
}

RVec GeodesicTrace::at(double s) const {
  if (t.empty()) throw std::logic_error("empty trace");
  if (s < t.front() || s > t.back()) throw std::invalid_argument("time outside the trace");
  auto it = std::upper_bound(t.begin(), t.end(), s);
  size_t i = it == t.begin() ? 0 : size_t(it - t.begin()) - 1;
  if (i + 1 >= t.size()) return pos.back();
  double a = (s - t[i]) / (t[i + 1] - t[i]);
  return raxpy(pos[i], a, rsub(pos[i + 1], pos[i]));
}

GeodesicTrace integrate_geodesic(const ConformalTorusMetric& g, const RVec& x0, const RVec& d0, double t_max,
                                 const IntegratorOptions& opt) {
  const int n = g.n;
  if ((int)x0.size() != n || (int)d0.size() != n) throw std::invalid_argument("integrate_geodesic: dimension mismatch");
  if (!(t_max > 0)) throw std::invalid_argument("integrate_geodesic: t_max must be positive");
  if (norm_l2(d0) == 0) throw std::invalid_argument("integrate_geodesic: zero direction");
  using State = std::vector<double>;
  RVec grad;
  double f0 = g.f_grad(x0, grad);
  if (!(f0 > 0)) throw std::invalid_argument("integrate_geodesic: f must be positive");
  State x(2 * n);
  for (int k = 0; k < n; ++k) {
    x[k] = x0[k];
    x[n + k] = d0[k] / (norm_l2(d0) * f0);
  }
  // x'' = -2 <grad phi, x'> x' + |x'|^2 grad phi with phi = log f
  auto rhs = [&g, n](const State& s, State& ds, double) {
    RVec p(s.begin(), s.begin() + n), gr;
    double f = g.f_grad(p, gr);
    double vg = 0, vv = 0;
    for (int k = 0; k < n; ++k) {
      gr[k] /= f;
      vg += gr[k] * s[n + k];
      vv += s[n + k] * s[n + k];
    }
    for (int k = 0; k < n; ++k) {
      ds[k] = s[n + k];
      ds[n + k] = -2.0 * vg * s[n + k] + vv * gr[k];
    }
  };
  auto stepper = odeint::make_controlled(opt.abs_tol, opt.rel_tol, odeint::runge_kutta_dopri5<State>());
  GeodesicTrace tr;
  tr.kind = GeodesicTrace::Kind::continuous;
  tr.t.push_back(0.0);
  tr.pos.push_back(x0);
  double t = 0, dt = std::min(opt.dt_init, t_max), t_last = 0;
  while (t < t_max) {
    dt = std::min({dt, t_max - t, opt.dt_max});
    if (dt < opt.dt_min && t_max - t > opt.dt_min) throw std::runtime_error("integrate_geodesic: step underflow");
    if (stepper.try_step(rhs, x, t, dt) != odeint::success) continue;
    RVec p(x.begin(), x.begin() + n);
    double f = g.f_grad(p, grad);
    double sp = 0;
    for (int k = 0; k < n; ++k) sp += x[n + k] * x[n + k];
    sp = f * std::sqrt(sp);
    double err = sp - 1.0;
    if (t > t_last) tr.max_drift_rate = std::max(tr.max_drift_rate, std::fabs(err) / (t - t_last));
    if (std::fabs(err) > opt.renorm_threshold) {
      for (int k = 0; k < n; ++k) x[n + k] /= sp;
      tr.renorm.push_back({t, err});
      t_last = t;
    }
    tr.t.push_back(t);
    tr.pos.push_back(std::move(p));
  }
  return tr;
}

// ---------------------------------------------------------------- discrete traces

namespace {

// Discrete trace from backward edges (in forward time order) and forward edges
// around a knot at `origin_vertex`.
GeodesicTrace discrete_trace(const PeriodicSpace& s, const std::vector<int>& backward, const std::vector<int>& forward,
                             int origin_vertex) {
  GeodesicTrace tr;
  tr.kind = GeodesicTrace::Kind::discrete;
  const int b = s.rank();
  std::vector<double> tb;
  std::vector<RVec> pb;
  std::vector<IVec> lb;
  RVec p = s.position(origin_vertex);
  IVec lab(b, 0);
  double t = 0;
  for (auto it = backward.rbegin(); it != backward.rend(); ++it) {
    RVec d = s.cover_displacement(*it);
    p = raxpy(p, -1.0, d);
    lab = sub(lab, s.label(*it));
    t -= s.edge(*it).length;
    tb.push_back(t);
    pb.push_back(p);
    lb.push_back(lab);
  }
  for (size_t k = tb.size(); k-- > 0;) {
    tr.t.push_back(tb[k]);
    tr.pos.push_back(pb[k]);
    tr.labels.push_back(lb[k]);
  }
  tr.origin = tr.t.size();
  tr.walk = backward;
  p = s.position(origin_vertex);
  lab.assign(b, 0);
  t = 0;
  tr.t.push_back(0.0);
  tr.pos.push_back(p);
  tr.labels.push_back(lab);
  for (int e : forward) {
    p = raxpy(p, 1.0, s.cover_displacement(e));
    lab = add(lab, s.label(e));
    t += s.edge(e).length;
    tr.t.push_back(t);
    tr.pos.push_back(p);
    tr.labels.push_back(lab);
    tr.walk.push_back(e);
  }
  return tr;
}

}  // namespace

GeodesicTrace periodic_trace(const PeriodicSpace& s, const std::vector<int>& loop, int reps) {
  if (loop.empty() || !is_closed_walk(s, loop)) throw std::invalid_argument("periodic_trace: need a closed walk");
  if (reps < 1) throw std::invalid_argument("periodic_trace: reps must be >= 1");
  std::vector<int> w;
  for (int r = 0; r < reps; ++r) w.insert(w.end(), loop.begin(), loop.end());
  return discrete_trace(s, w, w, s.edge(loop.front()).u);
}

GeodesicTrace reverse_trace(const GeodesicTrace& tr) {
  GeodesicTrace r;
  r.kind = tr.kind;
  const size_t m = tr.t.size();
  for (size_t k = m; k-- > 0;) {
    r.t.push_back(-tr.t[k]);
    r.pos.push_back(tr.pos[k]);
    if (!tr.labels.empty()) r.labels.push_back(tr.labels[k]);
  }
  // the origin knot is the one with t == 0
  r.origin = m - 1 - tr.origin;
  return r;
}

std::string trace_csv(const GeodesicTrace& tr) {
  std::ostringstream os;
  const int n = tr.pos.empty() ? 0 : (int)tr.pos.front().size();
  os << 't';
  for (int k = 1; k <= n; ++k) os << ",x" << k;
  if (!tr.labels.empty())
    for (int k = 1; k <= n; ++k) os << ",h" << k;
  os << '\n';
  for (size_t i = 0; i < tr.t.size(); ++i) {
    os << format_vec(RVec{tr.t[i]});
    for (double c : tr.pos[i]) os << ',' << format_vec(RVec{c});
    if (!tr.labels.empty())
      for (long long c : tr.labels[i]) os << ',' << c;
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------- edge construction

RVec default_eta(const RVec& x, const RVec& y, const RVec& z) {
  RVec d = rsub(y, x);
  double zz = dot(z, z);
  if (zz == 0) throw std::invalid_argument("default_eta: z is zero");
  return raxpy(d, -dot(d, z) / zz, z);
}

EdgeRay discrete_minimal_ray_from_edge(HomologySolver& solver, const ConstantsLedger& ledger, const SymPolytope& poly,
                                       int edge_id, const RVec& z, const RVec& eta, const EdgeRayOptions& opt) {
  const PeriodicSpace& s = solver.space();
  const int b = s.rank();
  if (edge_id < 0 || edge_id >= (int)poly.edges.size()) throw std::invalid_argument("edge id out of range");
  if ((int)z.size() != b || (int)eta.size() != b || poly.n != b) throw std::invalid_argument("rank mismatch");
  EdgeRay ray;
  ray.edge_id = edge_id;
  auto [u, v] = poly.edges[edge_id];
  RVec x = poly.vertices[u], y = poly.vertices[v];
  // z strictly inside [x, y]
  RVec d = rsub(y, x);
  double sp = dot(rsub(z, x), d) / dot(d, d);
  double scale = std::max(1.0, norm_l2(d));
  if (dist(z, raxpy(x, sp, d)) > 1e-9 * scale || sp <= 1e-9 || sp >= 1 - 1e-9)
    throw std::invalid_argument("precondition: z must lie in the open edge");
  double ez = dot(eta, z);
  if (std::fabs(ez) > 1e-9 * std::max(1.0, norm_l2(eta) * norm_l2(z)))
    throw std::invalid_argument("precondition: <eta, z> must vanish");
  if (!(dot(eta, x) < 0 && dot(eta, y) > 0)) {
    if (dot(eta, y) < 0 && dot(eta, x) > 0)
      std::swap(x, y);
    else
      throw std::invalid_argument("precondition: eta must separate the edge endpoints");
  }
  ray.x = x;
  ray.y = y;
  ray.z = z;
  ray.eta = eta;
  // supporting covector: a facet through the edge
  RVec omega;
  for (const auto& f : poly.facets)
    if (std::binary_search(f.vertices.begin(), f.vertices.end(), u) &&
        std::binary_search(f.vertices.begin(), f.vertices.end(), v)) {
      omega = f.normal;
      break;
    }
  ray.ell = 0;
  for (int k = 1; k < b; ++k)
    if (std::fabs(z[k]) > std::fabs(z[ray.ell]) + 1e-12) ray.ell = k;

  std::vector<std::vector<int>> rotated;
  BudgetScope scope(solver, opt.loop_budget);
  for (long long i = 1; i <= opt.depth; ++i) {
    EdgeStep st;
    st.i = i;
    st.z_i.resize(b);
    for (int k = 0; k < b; ++k) st.z_i[k] = std::llround(double(i) * z[k]);
    if (is_zero(st.z_i) || st.z_i[ray.ell] == 0) continue;
    st.lambda = -dot(eta, st.z_i) / double(st.z_i[ray.ell]);
    RVec eta_i = eta;
    eta_i[ray.ell] += st.lambda;
    auto r = solver.minimal_length(st.z_i, &ledger);
    st.length = r.length;
    st.certified = r.optimal_certified;
    // u along the loop; the minimum becomes the start
    PLPath lift = lift_walk(s, r.loop);
    double best = INFINITY;
    for (size_t k = 0; k < r.loop.size(); ++k) {
      double uk = dot(eta_i, rsub(lift.x[k], lift.x[0]));
      if (uk < best - 1e-12) {
        best = uk;
        st.shift = k;
      }
    }
    rotated.push_back(rotate_walk(r.loop, st.shift));
    ray.log.push_back(st);
  }
  if (rotated.empty()) throw std::runtime_error("edge construction produced no loops");
  (void)omega;

  // majority vote over the last loops, edge by edge from the start (forward)
  // and from the end (backward)
  size_t W = std::min<size_t>(opt.vote_window, rotated.size());
  std::vector<const std::vector<int>*> window;
  for (size_t k = rotated.size() - W; k < rotated.size(); ++k) window.push_back(&rotated[k]);
  auto vote = [&](bool forward) {
    std::vector<int> out;
    std::vector<char> alive(W, 1);
    for (size_t L = 0;; ++L) {
      std::map<int, int> count;
      for (size_t j = 0; j < W; ++j) {
        if (!alive[j] || window[j]->size() <= L) continue;
        const auto& w = *window[j];
        count[forward ? w[L] : w[w.size() - 1 - L]]++;
      }
      int best = -1, bc = 0;
      for (auto [e, c] : count)
        if (c > bc) best = e, bc = c;
      if (2 * bc <= (int)W) break;
      for (size_t j = 0; j < W; ++j) {
        if (!alive[j]) continue;
        const auto& w = *window[j];
        if (w.size() <= L || (forward ? w[L] : w[w.size() - 1 - L]) != best) alive[j] = 0;
      }
      out.push_back(best);
    }
    return out;
  };
  std::vector<int> fwd = vote(true), bwd = vote(false);
  std::reverse(bwd.begin(), bwd.end());  // forward time order
  int origin = s.edge(window.back()->front()).u;
  if (!fwd.empty() && s.edge(fwd.front()).u != origin) fwd.clear();
  if (!bwd.empty() && s.edge(bwd.back()).v != origin) bwd.clear();
  ray.forward_length = walk_length(s, fwd);
  ray.backward_length = walk_length(s, bwd);
  ray.trace = discrete_trace(s, bwd, fwd, origin);
  ray.converged = ray.forward_length >= opt.min_window && ray.backward_length >= opt.min_window;
  if (!ray.converged) {
    std::ostringstream os;
    os << "no stabilization by depth " << opt.depth << ": window " << ray.backward_length << " back, "
       << ray.forward_length << " forward";
    ray.note = os.str();
  }
  return ray;
}

// ---------------------------------------------------------------- asymptotes

std::vector<double> default_horizons(double T) { return {T, 2 * T, 4 * T, 8 * T}; }

namespace {

std::vector<AsymptotePoint> cluster(const std::vector<RVec>& pts, double r) {
  std::vector<std::vector<int>> cl;
  for (int i = 0; i < (int)pts.size(); ++i) cl.push_back({i});
  auto linkage = [&](const std::vector<int>& a, const std::vector<int>& c) {
    double m = 0;
    for (int i : a)
      for (int j : c) m = std::max(m, dist(pts[i], pts[j]));
    return m;
  };
  while (cl.size() > 1) {
    double best = INFINITY;
    size_t bi = 0, bj = 0;
    for (size_t i = 0; i < cl.size(); ++i)
      for (size_t j = i + 1; j < cl.size(); ++j) {
        double l = linkage(cl[i], cl[j]);
        if (l < best) best = l, bi = i, bj = j;
      }
    if (best > r) break;
    cl[bi].insert(cl[bi].end(), cl[bj].begin(), cl[bj].end());
    cl.erase(cl.begin() + bj);
  }
  std::vector<AsymptotePoint> out;
  for (auto& c : cl) {
    std::sort(c.begin(), c.end());
    AsymptotePoint p;
    p.v.assign(pts[c[0]].size(), 0.0);
    for (int i : c) p.v = raxpy(p.v, 1.0 / c.size(), pts[i]);
    for (int i : c) p.radius = std::max(p.radius, dist(p.v, pts[i]));
    out.push_back(p);
  }
  return out;
}

}  // namespace

AsymptoteSet asymptotes(const GeodesicTrace& tr, const std::vector<double>& horizons, double cluster_radius) {
  if (horizons.size() < 2) throw std::invalid_argument("asymptotes: need at least two horizons");
  for (size_t i = 1; i < horizons.size(); ++i)
    if (!(horizons[i] > horizons[i - 1])) throw std::invalid_argument("asymptotes: horizons must increase");
  if (!(horizons[0] > 0)) throw std::invalid_argument("asymptotes: horizons must be positive");
  if (horizons.back() > tr.t_max() || -horizons.back() < tr.t_min())
    throw std::invalid_argument("asymptotes: horizon exceeds trace");
  AsymptoteSet a;
  a.horizons = horizons;
  const double t0 = horizons[0];
  RVec pf0 = tr.at(t0), pb0 = tr.at(-t0);
  for (size_t i = 1; i < horizons.size(); ++i) {
    double T = horizons[i];
    a.plus_samples.push_back(rscale(rsub(tr.at(T), pf0), 1.0 / (T - t0)));
    a.minus_samples.push_back(rscale(rsub(pb0, tr.at(-T)), 1.0 / (T - t0)));
  }
  std::vector<RVec> mixed;
  for (size_t i = 1; i < horizons.size(); ++i)
    for (size_t j = 1; j < horizons.size(); ++j) {
      double S = horizons[i], T = horizons[j];
      mixed.push_back(rscale(rsub(tr.at(T), tr.at(-S)), 1.0 / (T + S)));
    }
  // early horizons still carry the transient; cluster the later half only
  const size_t m = a.plus_samples.size(), first = m / 2;
  std::vector<RVec> tp(a.plus_samples.begin() + first, a.plus_samples.end());
  std::vector<RVec> tm(a.minus_samples.begin() + first, a.minus_samples.end());
  std::vector<RVec> tx;
  for (size_t i = first; i < m; ++i)
    for (size_t j = first; j < m; ++j) tx.push_back(mixed[i * m + j]);
  a.plus = cluster(tp, cluster_radius);
  a.minus = cluster(tm, cluster_radius);
  a.mixed = cluster(tx, cluster_radius);
  return a;
}

bool mixed_in_convjoin(const AsymptoteSet& a, double slack) {
  for (const auto& m : a.mixed) {
    double best = INFINITY;
    for (const auto& p : a.plus)
      for (const auto& q : a.minus) best = std::min(best, seg_dist(m.v, p.v, q.v) - p.radius - q.radius);
    if (best - m.radius > slack) return false;
  }
  return true;
}

RotationVector rotation_vector(const GeodesicTrace& tr, double s, double t,
                               const std::function<double(const RVec&)>& norm) {
  if (!(t > s)) throw std::invalid_argument("rotation_vector: need s < t");
  RotationVector r;
  r.h = rsub(tr.at(t), tr.at(s));
  double nh = norm(r.h);
  if (!(nh > 1e-12 * std::max(1.0, t - s))) throw std::invalid_argument("rotation_vector: zero displacement");
  r.R = rscale(r.h, 1.0 / nh);
  r.defect = dist(r.R, rscale(r.h, 1.0 / (t - s)));
  return r;
}

// ---------------------------------------------------------------- classification

double polytope_gauge(const SymPolytope& poly, const RVec& v) {
  double g = 0;
  for (const auto& f : poly.facets) g = std::max(g, dot(f.normal, v));
  return g;
}

std::string GeodesicClassification::summary() const {
  if (refused) return "refused (" + reason + ")";
  std::string s;
  for (const auto& l : labels) s += (s.empty() ? "" : ", ") + l;
  return s;
}

GeodesicClassification classify(const AsymptoteSet& a, const SymPolytope& poly, double tol) {
  GeodesicClassification c;
  if (a.plus.empty() || a.minus.empty()) {
    c.refused = true;
    c.reason = "empty asymptote set";
    return c;
  }
  for (const auto* set : {&a.plus, &a.minus})
    for (const auto& p : *set)
      if (p.radius > tol) {
        c.refused = true;
        c.reason = "asymptote radius exceeds tolerance";
        return c;
      }
  auto tail_moves = [&](const std::vector<RVec>& smp) {
    return smp.size() >= 2 && dist(smp[smp.size() - 1], smp[smp.size() - 2]) > tol;
  };
  bool ps = a.plus.size() == 1, ms = a.minus.size() == 1;
  // several clusters count as divergence only when the last samples settle
  if ((!ps && tail_moves(a.plus_samples)) || (!ms && tail_moves(a.minus_samples))) {
    c.refused = true;
    c.reason = "asymptotes not converged";
    return c;
  }
  auto match = [&](const RVec& v) {
    int best = -1;
    double bd = tol;
    for (int i = 0; i < (int)poly.vertices.size(); ++i) {
      double d = dist(v, poly.vertices[i]);
      if (d <= bd) bd = d, best = i;
    }
    return best;
  };
  c.diverging = !ps || !ms;
  c.semi_converging = ps || ms;
  if (ps && ms) {
    if (dist(a.plus[0].v, a.minus[0].v) <= tol)
      c.homoclinic = true;
    else
      c.heteroclinic = true;
  }
  if (ps) c.plus_vertex = match(a.plus[0].v);
  if (ms) c.minus_vertex = match(a.minus[0].v);
  c.exposed = ps && ms && c.plus_vertex >= 0 && c.minus_vertex >= 0;
  c.semi_exposed = c.plus_vertex >= 0 || c.minus_vertex >= 0;
  c.non_homoclinic = !c.homoclinic;
  for (const auto* set : {&a.plus, &a.minus})
    for (const auto& p : *set) c.sphere_defect = std::max(c.sphere_defect, std::fabs(polytope_gauge(poly, p.v) - 1.0));
  if (c.homoclinic) c.labels.push_back("homoclinic");
  if (c.heteroclinic) c.labels.push_back("heteroclinic");
  if (c.diverging) c.labels.push_back("diverging");
  if (c.semi_converging) c.labels.push_back("semi-converging");
  if (c.exposed) c.labels.push_back("exposed");
  if (c.semi_exposed) c.labels.push_back("semi-exposed");
  if (c.non_homoclinic) c.labels.push_back("non-homoclinic");
  return c;
}

// ---------------------------------------------------------------- symbols

SymbolSequence symbol_sequence(const GeodesicTrace& tr, const HedlundSpec& spec, double dwell_min) {
  if (dwell_min <= 0) {
    double r = 0;
    for (const auto& h : spec.highways) r = std::max(r, h.radius);
    dwell_min = 3.0 * 2.0 * r;  // crossing a tube at unit coordinate speed
  }
  HedlundField field(spec, false);
  SymbolSequence out;
  size_t i = 0;
  const size_t m = tr.t.size();
  while (i < m) {
    int tube = field.tube_of(tr.pos[i]);
    size_t j = i;
    while (j + 1 < m && field.tube_of(tr.pos[j + 1]) == tube) ++j;
    if (tube >= 0 && tr.t[j] - tr.t[i] >= dwell_min) {
      IVec cls = highway_class(spec.highways[tube]);
      RVec c = to_real(cls);
      double laps = dot(rsub(tr.pos[j], tr.pos[i]), c) / dot(c, c);
      long long k = std::llround(laps);
      for (long long q = 0; q < std::llabs(k); ++q) {
        Symbol s;
        s.highway = tube;
        s.orientation = k > 0 ? 1 : -1;
        double span = (tr.t[j] - tr.t[i]) / double(std::llabs(k));
        s.t_start = tr.t[i] + q * span;
        s.t_end = s.t_start + span;
        out.symbols.push_back(s);
      }
    }
    i = j + 1;
  }
  out.empty_flag = out.symbols.empty();
  return out;
}

std::string symbol_string(const SymbolSequence& s) {
  static const char* names[] = {"x", "y", "z", "w"};
  std::string out;
  for (const auto& sym : s.symbols) {
    if (!out.empty()) out += ' ';
    if (sym.orientation < 0) out += '~';
    out += sym.highway < 4 ? std::string(names[sym.highway]) : "h" + std::to_string(sym.highway);
  }
  return out;
}

// ---------------------------------------------------------------- two per edge

EdgePair construct_edge_pair(HomologySolver& solver, const ConstantsLedger& ledger, const SymPolytope& poly,
                             int edge_id, const EdgeRayOptions& opt, double tol) {
  auto [u, v] = poly.edges.at(edge_id);
  const RVec &x = poly.vertices[u], &y = poly.vertices[v];
  RVec z = rscale(raxpy(x, 1.0, y), 0.5);
  RVec eta = default_eta(x, y, z);
  const std::vector<double> H = opt.horizons.empty() ? default_horizons(opt.min_window / 8.0) : opt.horizons;
  auto run = [&](const RVec& zz, const RVec& e, EdgeRay& ray, GeodesicClassification& cl) {
    ray = discrete_minimal_ray_from_edge(solver, ledger, poly, edge_id, zz, e, opt);
    if (!ray.converged) {
      cl.refused = true;
      cl.reason = ray.note;
      return;
    }
    cl = classify(asymptotes(ray.trace, H, tol), poly, tol);
  };
  EdgePair p;
  run(z, eta, p.a, p.ca);
  run(z, rscale(eta, -1.0), p.b, p.cb);
  auto same = [&](const EdgeRay& r1, const EdgeRay& r2) {
    if (!r1.converged || !r2.converged) return false;
    auto a1 = asymptotes(r1.trace, H, tol);
    auto a2 = asymptotes(r2.trace, H, tol);
    if (a1.plus.size() != 1 || a2.plus.size() != 1 || a1.minus.size() != 1 || a2.minus.size() != 1) return false;
    return dist(a1.plus[0].v, a2.plus[0].v) <= tol && dist(a1.minus[0].v, a2.minus[0].v) <= tol;
  };
  if (!p.ca.refused && !p.cb.refused && p.ca.homoclinic && p.cb.homoclinic && same(p.a, p.b)) {
    // both homoclinic at z: redo the second one from a point between z and y
    p.used_fallback = true;
    RVec z2 = rscale(raxpy(z, 1.0, y), 0.5);
    run(z2, rscale(default_eta(x, y, z2), -1.0), p.b, p.cb);
  }
  p.distinguishable = p.a.converged && p.b.converged && !same(p.a, p.b);
  return p;
}

}  // namespace sn
