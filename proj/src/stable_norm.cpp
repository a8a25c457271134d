#include "stablenorm/stable_norm.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sn {

namespace {

// Restores the solver's options on scope exit.
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

int rank_float(std::vector<RVec> rows, double eps) {
  int r = 0;
  if (rows.empty()) return 0;
  const int n = (int)rows.front().size();
  for (int c = 0; c < n && r < (int)rows.size(); ++c) {
    int p = r;
    for (int i = r + 1; i < (int)rows.size(); ++i)
      if (std::fabs(rows[i][c]) > std::fabs(rows[p][c])) p = i;
    if (std::fabs(rows[p][c]) <= eps) continue;
    std::swap(rows[r], rows[p]);
    for (int i = r + 1; i < (int)rows.size(); ++i) {
      double f = rows[i][c] / rows[r][c];
      for (int k = c; k < n; ++k) rows[i][k] -= f * rows[r][k];
    }
    ++r;
  }
  return r;
}

int rank_exact(std::vector<QVec> rows) {
  int r = 0;
  if (rows.empty()) return 0;
  const int n = (int)rows.front().size();
  for (int c = 0; c < n && r < (int)rows.size(); ++c) {
    int p = -1;
    for (int i = r; i < (int)rows.size(); ++i)
      if (rows[i][c] != 0) {
        p = i;
        break;
      }
    if (p < 0) continue;
    std::swap(rows[r], rows[p]);
    for (int i = r + 1; i < (int)rows.size(); ++i) {
      if (rows[i][c] == 0) continue;
      Rational f = rows[i][c] / rows[r][c];
      for (int k = c; k < n; ++k) rows[i][k] -= f * rows[r][k];
    }
    ++r;
  }
  return r;
}

std::string join(const RVec& v) { return format_vec(v, ' ', 12); }

}  // namespace

StableNormEstimate stable_norm_of(HomologySolver& solver, const ConstantsLedger& ledger, const IVec& z,
                                  const StableOptions& opt) {
  if (is_zero(z)) throw std::invalid_argument("stable_norm_of: z must be non-zero");
  if ((int)z.size() != solver.space().rank()) throw std::invalid_argument("stable_norm_of: rank mismatch");
  StableNormEstimate est;
  est.direction = z;
  MinimalLengthResult base = solver.minimal_length(z, &ledger);
  est.n_z = base.length;
  est.n_z_lower = base.lower_bound;
  est.n_z_certified = base.optimal_certified;

  std::map<IVec, double> lower;  // search lower bounds of N(kz)
  lower[z] = base.lower_bound;
  QuasiNorm qn;
  qn.rank = (int)z.size();
  qn.delta = 2.0 * ledger.diam;
  qn.subhomogeneous = true;
  qn.evaluate = [&](const IVec& x) {
    if (x == z) return base.length;
    BudgetScope scope(solver, opt.bulk_budget);
    auto r = solver.minimal_length(x, &ledger);
    lower[x] = r.lower_bound;
    return r.length;
  };
  est.trace = homogenize(qn, z, opt.tol, opt.k_max);

  // a repeated loop is a loop: ||z|| <= N(kz)/k for every k
  est.hi = std::min(base.length, est.trace.hi);
  est.k_best = 1;
  for (const auto& st : est.trace.trace) {
    double q = st.n_kz / double(st.k);
    if (q < est.hi) {
      est.hi = q;
      est.k_best = st.k;
    }
  }
  est.lo = std::max(0.0, stable_lower_bound(solver, z));
  for (const auto& st : est.trace.trace) {
    double lb = lower.at(scale(z, st.k));
    est.lo = std::max(est.lo, (lb - ledger.D) / double(st.k));
  }
  if (est.lo > est.hi * (1 + 1e-12) + 1e-12) {
    std::ostringstream os;
    os << "empty stable-norm band for z = (" << format_vec(z) << "): lo " << est.lo << " > hi " << est.hi
       << "; ledger and search disagree";
    throw std::runtime_error(os.str());
  }
  est.lo = std::min(est.lo, est.hi);
  est.value = std::clamp(est.trace.value, est.lo, est.hi);
  return est;
}

ConstantsLedger derive_ledger(HomologySolver& solver, size_t k_search_budget, size_t lattice_point_budget) {
  const int b = solver.space().rank();
  std::map<IVec, double> boot;
  BudgetScope scope(solver, k_search_budget);
  for (int i = 0; i < b; ++i) {
    IVec e(b, 0);
    e[i] = 1;
    double best = INFINITY;
    for (long long k : {1, 2, 4, 8}) best = std::min(best, solver.minimal_length(scale(e, k)).length / double(k));
    boot[e] = best;
  }
  return compute_constants(solver, boot, lattice_point_budget);
}

std::vector<IVec> default_directions(int rank, int radius) { return primitive_directions(rank, radius); }

BallCloud sample_ball(HomologySolver& solver, const ConstantsLedger& ledger, const std::vector<IVec>& directions,
                      const StableOptions& opt, std::vector<StableNormEstimate>* estimates) {
  if (directions.empty()) throw std::invalid_argument("sample_ball: no directions");
  const int b = solver.space().rank();
  std::set<IVec> canon;
  for (const auto& d : directions) {
    if ((int)d.size() != b) throw std::invalid_argument("sample_ball: rank mismatch");
    if (!is_primitive(d)) throw std::invalid_argument("sample_ball: direction (" + format_vec(d) + ") is not primitive");
    canon.insert(is_canonical_sign(d) ? d : neg(d));
  }
  BallCloud c;
  c.rank = b;
  for (const auto& d : canon) {
    auto est = stable_norm_of(solver, ledger, d, opt);
    if (!(est.value > 0)) throw std::runtime_error("sample_ball: zero estimate for (" + format_vec(d) + ")");
    if (estimates) estimates->push_back(est);
    double len = norm_l2(d);
    double r = est.lo > 0 ? len * std::max(1.0 / est.lo - 1.0 / est.value, 1.0 / est.value - 1.0 / est.hi) : INFINITY;
    for (int s : {1, -1}) {
      BallPoint p;
      p.direction = scale(d, s);
      p.point = to_real(p.direction);
      for (auto& x : p.point) x /= est.value;
      p.value = est.value;
      p.lo = est.lo;
      p.hi = est.hi;
      p.error_radius = r;
      c.points.push_back(std::move(p));
    }
  }
  std::sort(c.points.begin(), c.points.end(),
            [](const BallPoint& a, const BallPoint& q) { return a.direction < q.direction; });
  return c;
}

std::string estimates_csv(const std::vector<StableNormEstimate>& est) {
  std::ostringstream os;
  os << "direction,value,lo,hi,n_z,n_z_lower,n_z_certified,k_best\n";
  for (const auto& e : est)
    os << format_vec(e.direction) << ',' << format_vec(RVec{e.value}) << ',' << format_vec(RVec{e.lo}) << ','
       << format_vec(RVec{e.hi}) << ',' << format_vec(RVec{e.n_z}) << ',' << format_vec(RVec{e.n_z_lower}) << ','
       << e.n_z_certified << ',' << e.k_best << '\n';
  return os.str();
}

std::string ball_cloud_csv(const BallCloud& c) {
  std::ostringstream os;
  os << "direction,value,lo,hi,error_radius,point\n";
  for (const auto& p : c.points)
    os << format_vec(p.direction) << ',' << format_vec(RVec{p.value}) << ',' << format_vec(RVec{p.lo}) << ','
       << format_vec(RVec{p.hi}) << ',' << format_vec(RVec{p.error_radius}) << ',' << format_vec(p.point) << '\n';
  return os.str();
}

BallCloud parse_ball_cloud_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  BallCloud c;
  int lineno = 0;
  while (std::getline(is, line) && ++lineno && !line.empty() && line[0] == '#') {
  }
  if (line.rfind("direction,", 0) != 0) throw std::runtime_error("ball cloud csv: bad header");
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 6) throw std::runtime_error("ball cloud csv line " + std::to_string(lineno) + ": expected 6 fields");
    BallPoint p;
    p.direction = parse_ivec(f[0]);
    p.value = std::stod(f[1]);
    p.lo = std::stod(f[2]);
    p.hi = std::stod(f[3]);
    p.error_radius = std::stod(f[4]);
    std::istringstream ps(f[5]);
    double x;
    while (ps >> x) p.point.push_back(x);
    if (c.rank == 0) c.rank = (int)p.direction.size();
    if ((int)p.direction.size() != c.rank || (int)p.point.size() != c.rank)
      throw std::runtime_error("ball cloud csv line " + std::to_string(lineno) + ": rank mismatch");
    c.points.push_back(std::move(p));
  }
  return c;
}

SymPolytope cloud_hull(const BallCloud& c) {
  std::vector<RVec> pts;
  for (const auto& p : c.points) pts.push_back(p.point);
  return hull_symmetric(pts);
}

DualVector dual_norm_of(const BallCloud& cloud, const RVec& omega) {
  if ((int)omega.size() != cloud.rank) throw std::invalid_argument("dual_norm_of: rank mismatch");
  std::vector<RVec> pts;
  for (const auto& p : cloud.points) pts.push_back(p.point);
  if (rank_float(pts, 1e-12) < cloud.rank) throw std::invalid_argument("dual_norm_of: degenerate cloud");
  DualVector d;
  d.omega = omega;
  double w = norm_l2(omega);
  for (const auto& p : cloud.points) {
    d.dual_norm = std::max(d.dual_norm, std::fabs(dot(omega, p.point)));
    d.error = std::max(d.error, w * p.error_radius);
  }
  return d;
}

double polytope_dual_norm(const SymPolytope& p, const RVec& omega) {
  if ((int)omega.size() != p.n) throw std::invalid_argument("rank mismatch");
  double h = 0;
  for (const auto& v : p.vertices) h = std::max(h, std::fabs(dot(omega, v)));
  return h;
}

FaceDescriptor exposed_face(const SymPolytope& p, const RVec& omega, double tol) {
  double h = polytope_dual_norm(p, omega);
  if (!(h > 1e-14 * std::max(1.0, norm_l2(omega)))) throw std::invalid_argument("exposed_face: omega is numerically zero");
  FaceDescriptor f;
  f.omega = omega;
  for (auto& x : f.omega) x /= h;
  for (int i = 0; i < (int)p.vertices.size(); ++i)
    if (dot(f.omega, p.vertices[i]) >= 1.0 - tol) f.vertices.push_back(i);
  std::vector<RVec> diffs;
  for (size_t k = 1; k < f.vertices.size(); ++k) {
    RVec d(p.n);
    for (int j = 0; j < p.n; ++j) d[j] = p.vertices[f.vertices[k]][j] - p.vertices[f.vertices[0]][j];
    diffs.push_back(d);
  }
  f.dimension = rank_float(diffs, std::sqrt(tol));
  return f;
}

FaceDescriptor exposed_face_exact(const SymPolytope& p, const QVec& omega) {
  if (!p.exact) throw std::invalid_argument("exposed_face_exact: polytope has no exact vertices");
  if ((int)omega.size() != p.n) throw std::invalid_argument("rank mismatch");
  std::vector<Rational> val;
  Rational h = 0;
  for (const auto& v : p.vertices_exact) {
    Rational s = 0;
    for (int j = 0; j < p.n; ++j) s += omega[j] * v[j];
    val.push_back(s);
    h = std::max(h, s);  // symmetric: max of <w,v> equals max |<w,v>|
  }
  if (h == 0) throw std::invalid_argument("exposed_face_exact: omega is zero");
  FaceDescriptor f;
  for (int j = 0; j < p.n; ++j) f.omega.push_back(Rational(omega[j] / h).convert_to<double>());
  for (int i = 0; i < (int)val.size(); ++i)
    if (val[i] == h) f.vertices.push_back(i);
  std::vector<QVec> diffs;
  for (size_t k = 1; k < f.vertices.size(); ++k) {
    QVec d(p.n);
    for (int j = 0; j < p.n; ++j) d[j] = p.vertices_exact[f.vertices[k]][j] - p.vertices_exact[f.vertices[0]][j];
    diffs.push_back(d);
  }
  f.dimension = rank_exact(diffs);
  return f;
}

std::string face_record(const SymPolytope& p, const FaceDescriptor& f) {
  std::ostringstream os;
  os << "{\"omega\": [";
  for (size_t j = 0; j < f.omega.size(); ++j) os << (j ? ", " : "") << join(RVec{f.omega[j]});
  os << "], \"dimension\": " << f.dimension << ", \"vertices\": [";
  for (size_t k = 0; k < f.vertices.size(); ++k) {
    os << (k ? ", " : "") << "[";
    const auto& v = p.vertices[f.vertices[k]];
    for (size_t j = 0; j < v.size(); ++j) os << (j ? ", " : "") << join(RVec{v[j]});
    os << "]";
  }
  os << "]}";
  return os.str();
}

}  // namespace sn
