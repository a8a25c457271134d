#include "stablenorm/splitting.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace sn {

namespace {

size_t segment_of(const std::vector<double>& t, double s) {
  // last knot index i with t[i] <= s, capped so that [i, i+1] is a segment
  auto it = std::upper_bound(t.begin(), t.end(), s);
  size_t i = it == t.begin() ? 0 : size_t(it - t.begin()) - 1;
  return std::min(i, t.size() - 2);
}

RVec sub_r(const RVec& a, const RVec& b) {
  RVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

std::vector<double> knots_of(const PLPath& p, const RVec& z) {
  const int m = (int)z.size();
  std::vector<double> t(m + 1, 0.0);
  double acc = 0;
  for (int k = 1; k <= m; ++k) {
    acc += z[k - 1] * z[k - 1];
    t[k] = std::min(p.length(), p.length() * acc);
  }
  t[m] = p.length();
  return t;
}

// Jacobian of the splitting map with respect to the ambient coordinates of z.
Eigen::MatrixXd splitting_jacobian(const PLPath& p, const RVec& z) {
  const int m = (int)z.size(), b = m - 1;
  auto t = knots_of(p, z);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(b, m);
  auto sg = [&](int i) { return z[i] > 0 ? 1.0 : (z[i] < 0 ? -1.0 : 0.0); };
  for (int k = 1; k <= b; ++k) {
    double w = sg(k - 1) - sg(k);  // coefficient of rho(t_k)
    if (w == 0) continue;
    RVec vel = p.velocity(t[k]);
    for (int j = 0; j < k; ++j)
      for (int r = 0; r < b; ++r) J(r, j) += w * vel[r] * 2.0 * p.length() * z[j];
  }
  return J;
}

double norm_r(const RVec& v) { return norm_l2(v); }

RVec normalized(RVec v) {
  double n = norm_l2(v);
  for (auto& c : v) c /= n;
  return v;
}

// Each interval (sign, a, b) of the parameter line cut by the knots.
std::vector<std::pair<double, double>> intervals_from(const PLPath& p, const RVec& z, double zero_coord) {
  auto t = knots_of(p, z);
  struct Run {
    int sign;
    double a, b;
  };
  std::vector<Run> runs;
  for (size_t i = 0; i < z.size(); ++i) {
    if (std::fabs(z[i]) <= zero_coord || t[i + 1] <= t[i]) continue;
    int s = z[i] > 0 ? 1 : -1;
    if (!runs.empty() && runs.back().sign == s)
      runs.back().b = t[i + 1];
    else
      runs.push_back({s, t[i], t[i + 1]});
  }
  std::vector<std::pair<double, double>> plus, minus;
  for (auto& r : runs) (r.sign > 0 ? plus : minus).push_back({r.a, r.b});
  return minus.size() < plus.size() ? minus : plus;
}

}  // namespace

RVec PLPath::at(double s) const {
  if (t.size() == 1) return x.front();
  s = std::clamp(s, 0.0, length());
  size_t i = segment_of(t, s);
  double h = t[i + 1] - t[i];
  double a = (s - t[i]) / h;
  RVec r(x[i].size());
  for (size_t k = 0; k < r.size(); ++k) r[k] = x[i][k] + a * (x[i + 1][k] - x[i][k]);
  return r;
}

RVec PLPath::velocity(double s) const {
  if (t.size() < 2) return RVec(dim(), 0.0);
  size_t i = segment_of(t, std::clamp(s, 0.0, length()));
  double h = t[i + 1] - t[i];
  RVec r(x[i].size());
  for (size_t k = 0; k < r.size(); ++k) r[k] = (x[i + 1][k] - x[i][k]) / h;
  return r;
}

void PLPath::validate() const {
  if (t.size() < 2 || t.size() != x.size()) throw std::invalid_argument("path needs at least two knots");
  if (t.front() != 0.0) throw std::invalid_argument("path time must start at 0");
  for (size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw std::invalid_argument("path times must increase strictly");
  for (const auto& p : x)
    if ((int)p.size() != dim()) throw std::invalid_argument("path points have mixed dimensions");
}

PLPath polyline_path(const std::vector<RVec>& points) {
  PLPath p;
  for (const auto& q : points) {
    if (!p.x.empty()) {
      double d = norm_l2(sub_r(q, p.x.back()));
      if (d == 0) continue;
      p.t.push_back(p.t.back() + d);
    } else {
      p.t.push_back(0.0);
    }
    p.x.push_back(q);
  }
  p.validate();
  return p;
}

RVec splitting_map(const PLPath& p, const RVec& z) {
  const int b = p.dim();
  if ((int)z.size() != b + 1) throw std::invalid_argument("splitting_map: z must live in R^{b+1}");
  auto t = knots_of(p, z);
  RVec v(b, 0.0), prev = p.at(0.0);
  for (int i = 1; i <= b + 1; ++i) {
    RVec cur = p.at(t[i]);
    double s = z[i - 1] > 0 ? 1.0 : (z[i - 1] < 0 ? -1.0 : 0.0);
    for (int k = 0; k < b; ++k) v[k] += s * (cur[k] - prev[k]);
    prev = std::move(cur);
  }
  return v;
}

double partition_residual(const PLPath& p, const std::vector<std::pair<double, double>>& intervals) {
  RVec total = sub_r(p.at(p.length()), p.at(0.0));
  RVec sum(p.dim(), 0.0);
  for (auto [a, b] : intervals) {
    RVec d = sub_r(p.at(b), p.at(a));
    for (int k = 0; k < p.dim(); ++k) sum[k] += d[k];
  }
  for (int k = 0; k < p.dim(); ++k) sum[k] -= 0.5 * total[k];
  return norm_l2(sum);
}

SplittingPartition split_path(const PLPath& p, const SplitOptions& opt) {
  p.validate();
  const int b = p.dim();
  if (b < 1 || b > 4) throw std::invalid_argument("split_path: rank must be in 1..4");
  const int m = b + 1;
  int grid = opt.grid > 0 ? opt.grid : (b == 1 ? 64 : b == 2 ? 32 : b == 3 ? 14 : 8);

  // coarse search over half the cube surface (the map is odd)
  struct Cand {
    double f;
    RVec z;
  };
  std::vector<Cand> cands;
  std::vector<int> idx(b, 0);
  for (int face = 0; face < m; ++face) {
    std::fill(idx.begin(), idx.end(), 0);
    while (true) {
      RVec z(m);
      int c = 0;
      for (int k = 0; k < m; ++k) z[k] = k == face ? 1.0 : -1.0 + (2.0 * idx[c++] + 1.0) / grid;
      z = normalized(z);
      cands.push_back({norm_r(splitting_map(p, z)), z});
      int k = b - 1;
      while (k >= 0 && idx[k] == grid - 1) idx[k--] = 0;
      if (k < 0) break;
      ++idx[k];
    }
  }
  size_t nstart = std::min<size_t>(cands.size(), opt.starts);
  std::partial_sort(cands.begin(), cands.begin() + nstart, cands.end(),
                    [](const Cand& a, const Cand& c) { return a.f < c.f; });

  SplittingPartition best;
  best.residual = INFINITY;
  for (size_t s = 0; s < nstart; ++s) {
    RVec z = cands[s].z;
    RVec v = splitting_map(p, z);
    double f = norm_r(v), lambda = 1e-3;
    for (int it = 0; it < opt.max_iter && f > 1e-15 * std::max(1.0, p.length()); ++it) {
      Eigen::MatrixXd J = splitting_jacobian(p, z);
      Eigen::VectorXd ze = Eigen::Map<const Eigen::VectorXd>(z.data(), m);
      Eigen::MatrixXd P = Eigen::MatrixXd::Identity(m, m) - ze * ze.transpose();
      Eigen::MatrixXd Jt = J * P;
      Eigen::VectorXd r = Eigen::Map<const Eigen::VectorXd>(v.data(), b);
      Eigen::MatrixXd A = Jt.transpose() * Jt;
      A.diagonal().array() += lambda * (1.0 + A.diagonal().array());
      Eigen::VectorXd step = P * A.ldlt().solve(-Jt.transpose() * r);
      RVec zn(m);
      for (int k = 0; k < m; ++k) zn[k] = z[k] + step[k];
      zn = normalized(zn);
      RVec vn = splitting_map(p, zn);
      double fn = norm_r(vn);
      if (fn < f) {
        z = std::move(zn);
        v = std::move(vn);
        f = fn;
        lambda = std::max(lambda / 3.0, 1e-12);
      } else {
        lambda *= 4.0;
        if (lambda > 1e10) break;
      }
    }
    auto iv = intervals_from(p, z, opt.zero_coord);
    double res = partition_residual(p, iv);
    if (res < best.residual) {
      best.intervals = iv;
      best.residual = res;
      best.sphere_point = z;
    }
    if (best.residual <= opt.eps) break;
  }
  best.d = (int)best.intervals.size();
  best.certified = best.residual <= opt.eps && best.d <= (b + 1) / 2;
  best.half.assign(b, 0.0);
  for (auto [a, c] : best.intervals) {
    RVec d = sub_r(p.at(c), p.at(a));
    for (int k = 0; k < b; ++k) best.half[k] += d[k];
  }
  return best;
}

PLPath lift_walk(const PeriodicSpace& s, const std::vector<int>& loop) {
  if (!s.has_cover_positions()) throw std::invalid_argument("lift_walk: space has no cover positions");
  if (loop.empty()) throw std::invalid_argument("lift_walk: empty walk");
  if (!is_closed_walk(s, loop)) throw std::invalid_argument("lift_walk: walk is not closed");
  PLPath p;
  p.t.push_back(0.0);
  p.x.push_back(s.position(s.edge(loop.front()).u));
  for (int e : loop) {
    RVec d = s.cover_displacement(e);
    RVec q = p.x.back();
    for (size_t k = 0; k < q.size(); ++k) q[k] += d[k];
    double len = s.edge(e).length;
    if (len <= 0) throw std::invalid_argument("lift_walk: non-positive edge length");
    p.t.push_back(p.t.back() + len);
    p.x.push_back(std::move(q));
  }
  return p;
}

SplittingPartition split_loop_with_basepoint(const PeriodicSpace& s, const std::vector<int>& loop,
                                             const SplitOptions& opt) {
  PLPath p = lift_walk(s, loop);
  SplittingPartition r = split_path(p, opt);
  r.offset = r.intervals.empty() ? 0.0 : r.intervals.front().first;
  for (auto& [a, c] : r.intervals) {
    a -= r.offset;
    c -= r.offset;
  }
  return r;
}

namespace {

// Knot index nearest to time s.
size_t nearest_knot(const std::vector<double>& T, double s) {
  auto it = std::lower_bound(T.begin(), T.end(), s);
  size_t i = size_t(it - T.begin());
  if (i == T.size()) return T.size() - 1;
  if (i > 0 && s - T[i - 1] < T[i] - s) return i - 1;
  return i;
}

// Closed walk through the given sub-walks of `loop` (knot ranges, cyclic),
// joined by shortest connectors.
std::vector<int> join_pieces(const PeriodicSpace& s, const std::vector<int>& loop,
                             const std::vector<std::pair<size_t, size_t>>& ranges) {
  const size_t m = loop.size();
  auto vert = [&](size_t knot) { return knot == m ? s.edge(loop.back()).v : s.edge(loop[knot]).u; };
  std::vector<std::vector<int>> pieces;
  for (auto [a, b] : ranges) {
    std::vector<int> w;
    if (a <= b) {
      for (size_t i = a; i < b; ++i) w.push_back(loop[i]);
    } else {  // wraps through the basepoint
      for (size_t i = a; i < m; ++i) w.push_back(loop[i]);
      for (size_t i = 0; i < b; ++i) w.push_back(loop[i]);
    }
    pieces.push_back(std::move(w));
  }
  std::vector<int> out;
  for (size_t j = 0; j < pieces.size(); ++j) {
    out.insert(out.end(), pieces[j].begin(), pieces[j].end());
    int from = vert(ranges[j].second);
    int to = vert(ranges[(j + 1) % ranges.size()].first);
    if (from != to) {
      auto tree = dijkstra(s, from);
      auto path = tree_path(s, tree, to);
      out.insert(out.end(), path.begin(), path.end());
    }
  }
  return out;
}

// Adds a loop of class w to a closed walk (or starts one), through a shortest
// connector from the walk's basepoint.
std::vector<int> correct_class(HomologySolver& solver, std::vector<int> walk, const IVec& w, int base) {
  const PeriodicSpace& s = solver.space();
  if (is_zero(w)) return walk;
  auto mu = solver.minimal_length(w).loop;
  int start = walk.empty() ? base : s.edge(walk.front()).u;
  int mstart = s.edge(mu.front()).u;
  std::vector<int> to, back;
  if (start != mstart) {
    to = tree_path(s, dijkstra(s, start), mstart);
    back = reverse_walk(s, to);
  }
  walk.insert(walk.end(), to.begin(), to.end());
  walk.insert(walk.end(), mu.begin(), mu.end());
  walk.insert(walk.end(), back.begin(), back.end());
  return walk;
}

}  // namespace

DoublingReport double_then_halve(HomologySolver& solver, const ConstantsLedger& ledger, const IVec& z,
                                 const SplitOptions& opt) {
  const PeriodicSpace& s = solver.space();
  if (is_zero(z)) throw std::invalid_argument("double_then_halve: z must be non-zero");
  DoublingReport r;
  r.z = z;
  r.D = ledger.D;
  IVec z2 = scale(z, 2);
  auto big = solver.minimal_length(z2, &ledger);
  r.n_2z = big.length;
  r.n_z = solver.minimal_length(z, &ledger).length;
  const auto& loop = big.loop;
  PLPath p = lift_walk(s, loop);
  r.split = split_path(p, opt);

  const auto& T = p.t;
  std::vector<std::pair<size_t, size_t>> plus, minus;
  for (auto [a, b] : r.split.intervals) plus.push_back({nearest_knot(T, a), nearest_knot(T, b)});
  // complement pieces, cyclically between consecutive intervals
  if (plus.empty()) {
    minus.push_back({0, loop.size()});
  } else {
    for (size_t j = 0; j < plus.size(); ++j) minus.push_back({plus[j].second, plus[(j + 1) % plus.size()].first});
  }
  int base = s.edge(loop.front()).u;
  auto build = [&](const std::vector<std::pair<size_t, size_t>>& ranges) {
    std::vector<int> w = ranges.empty() ? std::vector<int>{} : join_pieces(s, loop, ranges);
    IVec h = w.empty() ? IVec(s.rank(), 0) : lift_path(s, w);
    w = correct_class(solver, std::move(w), sub(z, h), base);
    if (lift_path(s, w) != z) throw std::logic_error("double_then_halve: rearranged loop has the wrong class");
    return w;
  };
  r.walk_plus = build(plus);
  r.walk_minus = build(minus);
  r.len_plus = walk_length(s, r.walk_plus);
  r.len_minus = walk_length(s, r.walk_minus);
  const double slack = 1e-9 * std::max(1.0, r.n_2z);
  r.sum_bound = r.len_plus + r.len_minus <= r.n_2z + r.D + slack;
  r.doubling_bound = 2.0 * r.n_z <= r.n_2z + r.D + slack;
  return r;
}

PLPath parse_path_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  PLPath p;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (lineno == 1 && line[0] == 't') continue;  // header
    std::vector<double> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      try {
        size_t used = 0;
        f.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw std::runtime_error("path csv line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    if (f.size() < 2) throw std::runtime_error("path csv line " + std::to_string(lineno) + ": expected t,x1..xb");
    p.t.push_back(f[0]);
    p.x.emplace_back(f.begin() + 1, f.end());
  }
  p.validate();
  return p;
}

std::string path_csv(const PLPath& p) {
  std::ostringstream os;
  os << 't';
  for (int k = 1; k <= p.dim(); ++k) os << ",x" << k;
  os << '\n';
  for (size_t i = 0; i < p.t.size(); ++i) {
    os << format_vec(RVec{p.t[i]});
    for (double c : p.x[i]) os << ',' << format_vec(RVec{c});
    os << '\n';
  }
  return os.str();
}

std::string partition_csv(const SplittingPartition& p) {
  std::ostringstream os;
  os << "sigma,tau\n";
  for (auto [a, b] : p.intervals) os << format_vec(RVec{a}) << ',' << format_vec(RVec{b}) << '\n';
  os << "residual," << format_vec(RVec{p.residual}) << '\n';
  return os.str();
}

}  // namespace sn
