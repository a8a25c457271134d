#include "stablenorm/homology_shortest.hpp"

#include <absl/container/flat_hash_map.h>

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace sn {

// ---------------------------------------------------------------------------
// Calibration by policy iteration for the maximum cycle ratio.

CalibratedCovector calibrate_covector(const PeriodicSpace& s, const RVec& omega) {
  if ((int)omega.size() != s.rank()) throw std::invalid_argument("covector rank mismatch");
  const int n = s.num_vertices(), m = s.num_edges();
  std::vector<double> w(m), len(m);
  for (int e = 0; e < m; ++e) {
    const long long* l = s.label_ptr(e);
    double d = 0;
    for (int k = 0; k < s.rank(); ++k) d += omega[k] * double(l[k]);
    w[e] = d;
    len[e] = s.edge(e).length;
  }
  std::vector<int> pi(n);
  for (int u = 0; u < n; ++u) {
    int best = *s.out_begin(u);
    for (const int* p = s.out_begin(u); p != s.out_end(u); ++p)
      if (w[*p] / len[*p] > w[best] / len[best]) best = *p;
    pi[u] = best;
  }
  std::vector<double> eta(n), x(n);
  std::vector<int> state(n), path;
  std::vector<int> pos_in_path(n, -1);
  const double eps = 1e-13;

  auto evaluate = [&] {
    std::fill(state.begin(), state.end(), 0);
    for (int u0 = 0; u0 < n; ++u0) {
      if (state[u0]) continue;
      path.clear();
      int u = u0;
      while (state[u] == 0) {
        state[u] = 1;
        pos_in_path[u] = (int)path.size();
        path.push_back(u);
        u = s.edge(pi[u]).v;
      }
      int stop = (int)path.size();
      if (state[u] == 1) {
        int idx = pos_in_path[u];
        double sw = 0, sl = 0;
        for (int j = idx; j < (int)path.size(); ++j) {
          sw += w[pi[path[j]]];
          sl += len[pi[path[j]]];
        }
        double ec = sw / sl;
        eta[u] = ec;
        x[u] = 0;
        state[u] = 2;
        for (int j = (int)path.size() - 1; j > idx; --j) {
          int c = path[j], e = pi[c], nx = s.edge(e).v;
          eta[c] = ec;
          x[c] = w[e] - ec * len[e] + x[nx];
          state[c] = 2;
        }
        stop = idx;
      }
      for (int j = stop - 1; j >= 0; --j) {
        int c = path[j], e = pi[c], nx = s.edge(e).v;
        eta[c] = eta[nx];
        x[c] = w[e] - eta[nx] * len[e] + x[nx];
        state[c] = 2;
      }
      for (int c : path) pos_in_path[c] = -1;
    }
  };

  for (int iter = 0; iter < 5000; ++iter) {
    evaluate();
    bool changed = false;
    for (int u = 0; u < n; ++u) {
      int cur = pi[u];
      double best_eta = eta[s.edge(cur).v];
      int best = cur;
      for (const int* p = s.out_begin(u); p != s.out_end(u); ++p) {
        double ev = eta[s.edge(*p).v];
        if (ev > best_eta + eps * std::max(1.0, std::fabs(best_eta))) {
          best_eta = ev;
          best = *p;
        }
      }
      if (best == cur) {
        double bv = x[u];
        for (const int* p = s.out_begin(u); p != s.out_end(u); ++p) {
          int v = s.edge(*p).v;
          if (std::fabs(eta[v] - eta[u]) > eps * std::max(1.0, std::fabs(eta[u]))) continue;
          double val = w[*p] - eta[u] * len[*p] + x[v];
          if (val > bv + 1e-12 * std::max(1.0, std::fabs(bv))) {
            bv = val;
            best = *p;
          }
        }
      }
      if (best != cur) {
        pi[u] = best;
        changed = true;
      }
    }
    if (!changed) break;
  }

  CalibratedCovector cc;
  cc.omega = omega;
  double rho = *std::max_element(eta.begin(), eta.end());
  if (!(rho > 1e-12)) return cc;
  double c = 1.0 / rho;
  std::vector<double> phi(n);
  // Repair floating-point violations with Bellman-Ford passes; shrink c if needed.
  for (int attempt = 0; attempt < 12; ++attempt) {
    c *= (1.0 - (attempt == 0 ? 1e-12 : 1e-6 * attempt));
    for (int u = 0; u < n; ++u) phi[u] = x[u] / rho;
    bool ok = false;
    for (int pass = 0; pass < 400; ++pass) {
      bool changed = false;
      for (int e = 0; e < m; ++e) {
        const Edge& ed = s.edge(e);
        double lim = phi[ed.u] + len[e] - c * w[e];
        if (phi[ed.v] > lim) {
          phi[ed.v] = lim;
          changed = true;
        }
      }
      if (!changed) {
        ok = true;
        break;
      }
    }
    if (ok) break;
    if (attempt == 11) throw std::runtime_error("covector calibration did not converge");
  }
  cc.c = c;
  cc.phi = phi;
  cc.reduced.resize(m);
  cc.cw.resize(m);
  for (int e = 0; e < m; ++e) {
    const Edge& ed = s.edge(e);
    cc.cw[e] = c * w[e];
    cc.reduced[e] = std::max(0.0, len[e] - cc.cw[e] + phi[ed.u] - phi[ed.v]);
  }
  return cc;
}

// ---------------------------------------------------------------------------

std::vector<int> rotate_walk(const std::vector<int>& walk, size_t offset) {
  if (walk.empty()) return walk;
  offset %= walk.size();
  std::vector<int> r(walk.begin() + offset, walk.end());
  r.insert(r.end(), walk.begin(), walk.begin() + offset);
  return r;
}

// Booth's algorithm.
std::vector<int> least_rotation(const std::vector<int>& w) {
  size_t n = w.size();
  if (n == 0) return w;
  std::vector<long long> f(2 * n, -1);
  size_t k = 0;
  auto at = [&](size_t i) { return w[i % n]; };
  for (size_t j = 1; j < 2 * n; ++j) {
    long long i = f[j - k - 1];
    while (i != -1 && at(j) != at(k + i + 1)) {
      if (at(j) < at(k + i + 1)) k = j - i - 1;
      i = f[i];
    }
    if (i == -1 && at(j) != at(k + i + 1)) {
      if (at(j) < at(k + i + 1)) k = j;
      f[j - k] = -1;
    } else {
      f[j - k] = i + 1;
    }
  }
  return rotate_walk(w, k);
}

std::vector<int> minimal_loop_as_cycle(const PeriodicSpace& s, const MinimalLengthResult& r, int vertex) {
  if (r.loop.empty()) throw std::invalid_argument("empty loop");
  for (size_t i = 0; i < r.loop.size(); ++i)
    if (s.edge(r.loop[i]).u == vertex) return rotate_walk(r.loop, i);
  throw std::invalid_argument("vertex is not on the loop");
}

// ---------------------------------------------------------------------------

HomologySolver::HomologySolver(const PeriodicSpace& s, SearchOptions opts) : s_(s), opts_(opts) {}

const CalibratedCovector& HomologySolver::covector(const RVec& omega) {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  auto it = covectors_.find(omega);
  if (it != covectors_.end()) return *it->second;
  auto cc = std::make_unique<CalibratedCovector>(calibrate_covector(s_, omega));
  auto& ref = *cc;
  covectors_[omega] = std::move(cc);
  return ref;
}

double HomologySolver::max_edge_ratio_inf() const {
  double r = 0;
  for (int e = 0; e < s_.num_edges(); ++e) {
    RVec d = s_.cover_displacement(e);
    double m = 0;
    for (double c : d) m = std::max(m, std::fabs(c));
    r = std::max(r, m / s_.edge(e).length);
  }
  return r;
}

static std::vector<int> repeat_walk(const std::vector<int>& w, long long k) {
  std::vector<int> r;
  r.reserve(w.size() * size_t(k));
  for (long long i = 0; i < k; ++i) r.insert(r.end(), w.begin(), w.end());
  return r;
}

// Inserts the closed walk `piece` into the closed walk `walk`, joined by a
// shortest connector between their vertex sets (used there and back).
static void splice(const PeriodicSpace& s, std::vector<int>& walk, const std::vector<int>& piece) {
  if (walk.empty()) {
    walk = piece;
    return;
  }
  std::vector<int> from;
  for (int e : walk) from.push_back(s.edge(e).u);
  auto tree = dijkstra(s, from);
  size_t best = 0;
  for (size_t j = 1; j < piece.size(); ++j)
    if (tree.dist[s.edge(piece[j]).u] < tree.dist[s.edge(piece[best]).u]) best = j;
  int t = s.edge(piece[best]).u;
  auto p = tree_path(s, tree, t);
  int s0 = p.empty() ? t : s.edge(p.front()).u;
  size_t at = 0;
  while (s.edge(walk[at]).u != s0) ++at;
  std::vector<int> ins = p;
  auto rot = rotate_walk(piece, best);
  ins.insert(ins.end(), rot.begin(), rot.end());
  auto back = reverse_walk(s, p);
  ins.insert(ins.end(), back.begin(), back.end());
  walk.insert(walk.begin() + at, ins.begin(), ins.end());
}

// Upper-bound loop for z, from smaller classes: repeating the loop of z/g,
// growing the loop of the sign pattern of z by unit loops, or unit loops alone.
std::vector<int> HomologySolver::constructive_loop(const IVec& z, size_t budget) {
  const size_t base = std::max(budget, opts_.base_budget);
  long long g = gcd_all(z);
  int b = s_.rank();
  int nonzero = 0;
  for (long long c : z) nonzero += (c != 0);
  std::vector<int> best;
  double best_len = INFINITY;
  auto consider = [&](std::vector<int> w) {
    double l = walk_length(s_, w);
    if (l < best_len) {
      best_len = l;
      best = std::move(w);
    }
  };
  auto grow = [&](std::vector<int> walk, const IVec& have) {
    for (int k = 0; k < b; ++k) {
      long long extra = std::llabs(z[k]) - std::llabs(have[k]);
      if (extra <= 0) continue;
      IVec e(b, 0);
      e[k] = z[k] > 0 ? 1 : -1;
      const auto unit = solve(e, nullptr, base);
      if (unit.loop.empty()) throw std::runtime_error("no loop for a unit class");
      std::vector<int> spliced = walk;
      splice(s_, spliced, repeat_walk(unit.loop, extra));
      if (walk.empty()) {
        walk = std::move(spliced);
        continue;
      }
      // a lap of class e based on the walk itself may beat the connector
      double grown = walk_length(s_, spliced) - walk_length(s_, walk);
      std::vector<int> on;
      for (int x : walk) on.push_back(s_.edge(x).u);
      auto lap = search(e, nullptr, std::min(budget, opts_.base_budget), &on, grown / double(extra));
      if (!lap.loop.empty() && double(extra) * lap.length < grown) {
        int u = s_.edge(lap.loop.front()).u;
        size_t at = 0;
        while (s_.edge(walk[at]).u != u) ++at;
        auto rep = repeat_walk(lap.loop, extra);
        walk.insert(walk.begin() + at, rep.begin(), rep.end());
      } else {
        walk = std::move(spliced);
      }
    }
    return walk;
  };
  if (g > 1) {
    IVec zp(z.size());
    for (size_t k = 0; k < z.size(); ++k) zp[k] = z[k] / g;
    consider(repeat_walk(solve(zp, nullptr, norm_inf(zp) <= 1 ? base : budget).loop, g));
  }
  if (nonzero <= 1) return best;
  IVec sgn(b, 0);
  for (int k = 0; k < b; ++k) sgn[k] = (z[k] > 0) - (z[k] < 0);
  if (sgn != z) consider(grow(solve(sgn, nullptr, base).loop, sgn));
  consider(grow({}, IVec(b, 0)));
  return best;
}

double HomologySolver::crude_bound(const IVec& z) {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  if (is_zero(z)) return 0.0;
  auto w = constructive_loop(z, opts_.state_budget);
  if (w.empty()) return minimal_length(z).length;
  return walk_length(s_, w);
}

MinimalLengthResult HomologySolver::minimal_length(const IVec& z, const ConstantsLedger* ledger) {
  return solve(z, ledger, opts_.state_budget);
}

MinimalLengthResult HomologySolver::solve(const IVec& z, const ConstantsLedger* ledger, size_t budget) {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  if ((int)z.size() != s_.rank()) throw std::invalid_argument("rank mismatch");
  check_coords(z);
  if (is_zero(z)) {
    MinimalLengthResult r;
    r.cls = z;
    return r;
  }
  if (!is_canonical_sign(z)) {
    MinimalLengthResult r = solve(neg(z), ledger, budget);
    r.cls = z;
    r.loop = least_rotation(reverse_walk(s_, r.loop));
    return r;
  }
  auto it = cache_.find(z);
  if (it != cache_.end() && (it->second.first.optimal_certified || it->second.second >= budget)) return it->second.first;
  MinimalLengthResult r = search(z, ledger, budget);
  cache_[z] = {r, budget};
  return r;
}

namespace {

struct Node {
  int src;
  int v;
  int parent;
  int via;
  double g;
  uint64_t lam;
  bool closed;
};

struct QItem {
  double f;
  double g;
  int node;
  bool exact;
};

struct QCmp {
  bool operator()(const QItem& a, const QItem& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.g != b.g) return a.g < b.g;
    return a.node > b.node;
  }
};

// Reverse Dijkstra on reduced costs towards one source vertex, advanced lazily.
struct RevSearch {
  std::vector<double> dist;
  std::vector<char> done;
  std::priority_queue<std::pair<double, int>, std::vector<std::pair<double, int>>, std::greater<>> heap;

  RevSearch(int n, int m) : dist(n, INFINITY), done(n, 0) {
    dist[m] = 0.0;
    heap.push({0.0, m});
  }
  double frontier() {
    while (!heap.empty()) {
      auto [d, x] = heap.top();
      if (done[x] || d > dist[x]) {
        heap.pop();
        continue;
      }
      return d;
    }
    return INFINITY;
  }
  // Settle vertices until v is settled or the frontier exceeds `need`; always
  // settles at least one vertex so repeated refinement makes progress.
  void advance(const PeriodicSpace& s, const std::vector<double>& red, int v, double need) {
    bool first = true;
    while (!done[v]) {
      double f = frontier();
      if (f == INFINITY || (f > need && !first)) return;
      first = false;
      auto [d, x] = heap.top();
      heap.pop();
      done[x] = 1;
      for (const int* p = s.out_begin(x); p != s.out_end(x); ++p) {
        int y = s.edge(*p).v;
        if (done[y]) continue;
        double nd = d + red[s.edge(*p).reverse];
        if (nd < dist[y]) {
          dist[y] = nd;
          heap.push({nd, y});
        }
      }
    }
  }
  // exact distance if settled, else a lower bound
  double lower(int v, bool& exact) {
    exact = done[v];
    return exact ? dist[v] : frontier();
  }
};

struct KeyHash {
  size_t operator()(const std::pair<uint64_t, uint64_t>& k) const noexcept {
    return absl::Hash<std::pair<uint64_t, uint64_t>>()(k);
  }
};

std::vector<RVec> coordinate_and_diagonal_covectors(int b, bool both_signs) {
  std::vector<RVec> out;
  if (b <= 3) {
    for (auto& v : both_signs ? primitive_vectors(b, 1) : primitive_directions(b, 1)) out.push_back(to_real(v));
  } else {
    for (int k = 0; k < b; ++k)
      for (int sgn : {1, -1}) {
        if (sgn < 0 && !both_signs) continue;
        RVec e(b, 0.0);
        e[k] = sgn;
        out.push_back(e);
      }
  }
  return out;
}

}  // namespace

// A* over (source, vertex, partial label) states. A loop of class z crosses the
// cut coordinate `cut` positively, so it can be started at the tail of such an
// edge. The heuristic is the largest of several calibrated covector bounds on
// the remaining label; the leading one also carries the reduced-cost distance
// back to the source.
MinimalLengthResult HomologySolver::search(const IVec& z, const ConstantsLedger* ledger, size_t budget,
                                           const std::vector<int>* through, double cap_hint) {
  const int b = s_.rank();
  const int nv = s_.num_vertices();
  MinimalLengthResult res;
  res.cls = z;

  std::vector<int> known = through ? std::vector<int>{} : constructive_loop(z, budget);
  double U0 = known.empty() ? cap_hint : walk_length(s_, known);
  double cap = std::min(U0, opts_.length_cap);
  if (ledger && ledger->D > 0) {
    double est = 0;  // triangle-inequality upper bound on the stable norm
    bool have = true;
    for (int k = 0; k < b && have; ++k) {
      if (z[k] == 0) continue;
      IVec e(b, 0);
      e[k] = 1;
      auto it = cache_.find(e);
      if (it == cache_.end()) have = false;
      else est += std::llabs(z[k]) * it->second.first.length;
    }
    if (have) cap = std::min(cap, est + ledger->D);
  }

  // packing of partial labels
  const int bits = std::min(31, 63 / b);
  const long long off = 1LL << (bits - 1);
  const uint64_t mask = (1ULL << bits) - 1;
  long long R = off - 1;
  if (std::isfinite(cap)) {
    double r = cap * max_edge_ratio_inf() + (s_.has_cover_positions() ? 1.0 : 0.0);
    R = std::min<long long>(R, (long long)std::floor(r + 1e-9));
  }
  res.window_radius = R;
  auto pack = [&](const long long* lam) {
    uint64_t p = 0;
    for (int k = 0; k < b; ++k) p |= uint64_t(lam[k] + off) << (bits * k);
    return p;
  };
  auto unpack = [&](uint64_t p, long long* lam) {
    for (int k = 0; k < b; ++k) lam[k] = (long long)((p >> (bits * k)) & mask) - off;
  };

  // leading covector
  std::vector<RVec> cands = coordinate_and_diagonal_covectors(b, true);
  {
    IVec zp = z;
    long long g = gcd_all(z);
    for (auto& c : zp) c /= g;
    RVec d = to_real(zp);
    double nz = norm_l2(d);
    for (auto& c : d) c /= nz;
    cands.push_back(d);
  }
  const CalibratedCovector* cov = nullptr;
  double best_score = 0;
  for (const auto& om : cands) {
    if (dot(om, z) <= 0) continue;
    const auto& cc = covector(om);
    double sc = cc.c * dot(om, z);
    if (cov == nullptr || sc > best_score) {
      cov = &cc;
      best_score = sc;
    }
  }
  if (cov == nullptr || best_score <= 0) throw std::runtime_error("no calibrated covector pairs positively with the class");
  // auxiliary covectors, used with both signs through |.|
  std::vector<const CalibratedCovector*> aux;
  for (const auto& om : coordinate_and_diagonal_covectors(b, false)) {
    const auto& cc = covector(om);
    if (cc.c > 0) aux.push_back(&cc);
  }
  const int na = (int)aux.size();
  std::vector<double> aux_cz(na), aux_co(size_t(na) * b), aux_phi(size_t(nv) * na);
  for (int a = 0; a < na; ++a) {
    aux_cz[a] = aux[a]->c * dot(aux[a]->omega, z);
    for (int k = 0; k < b; ++k) aux_co[size_t(a) * b + k] = aux[a]->c * aux[a]->omega[k];
    for (int v = 0; v < nv; ++v) aux_phi[size_t(v) * na + a] = aux[a]->phi[v];
  }
  std::vector<double> main_co(b);
  for (int k = 0; k < b; ++k) main_co[k] = cov->c * cov->omega[k];
  const double czw = best_score;
  const auto& phi = cov->phi;

  // cut coordinate with the fewest sources
  int cut = -1;
  std::vector<int> sources;
  if (through) {
    sources = *through;
    std::sort(sources.begin(), sources.end());
    sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
  }
  for (int k = 0; k < b && !through; ++k) {
    if (z[k] == 0) continue;
    int sg = z[k] > 0 ? 1 : -1;
    std::vector<int> src;
    for (int v = 0; v < nv; ++v)
      for (const int* p = s_.out_begin(v); p != s_.out_end(v); ++p)
        if (sg * s_.label_ptr(*p)[k] > 0) {
          src.push_back(v);
          break;
        }
    if (cut < 0 || src.size() < sources.size()) {
      cut = k;
      sources = std::move(src);
    }
  }
  const int sg = through ? 0 : (z[cut] > 0 ? 1 : -1);

  // static part of the heuristic: (leading term without dR, auxiliary max)
  auto h_static = [&](int m, int v, const long long* lam, double& lead) {
    double wl = 0;
    for (int k = 0; k < b; ++k) wl += main_co[k] * double(lam[k]);
    lead = czw - wl + phi[m] - phi[v];
    double ax = 0;
    const double* pm = &aux_phi[size_t(m) * na];
    const double* pv = &aux_phi[size_t(v) * na];
    for (int a = 0; a < na; ++a) {
      const double* co = &aux_co[size_t(a) * b];
      double t = aux_cz[a] + pm[a] - pv[a];
      for (int k = 0; k < b; ++k) t -= co[k] * double(lam[k]);
      ax = std::max(ax, std::fabs(t));
    }
    return ax;
  };

  std::vector<Node> nodes;
  absl::flat_hash_map<std::pair<uint64_t, uint64_t>, int, KeyHash> index;
  std::priority_queue<QItem, std::vector<QItem>, QCmp> pq;
  std::vector<std::unique_ptr<RevSearch>> revs(sources.size());
  auto rev = [&](int si) -> RevSearch& {
    if (!revs[si]) revs[si] = std::make_unique<RevSearch>(nv, sources[si]);
    return *revs[si];
  };
  std::vector<long long> zl(z.begin(), z.end());
  const uint64_t zpack = pack(zl.data());
  const double U = cap;
  auto over = [&](double f) { return f > U * (1 + 1e-12) + 1e-15; };

  std::vector<long long> lam(b), lam2(b);
  // Creates or improves the state reached by edge e with partial label lam2.
  auto relax = [&](int si, int parent, int e, double g2) {
    const Edge& ed = s_.edge(e);
    const int m = sources[si];
    double lead;
    double ax = h_static(m, ed.v, lam2.data(), lead);
    bool ex;
    double lb = rev(si).lower(ed.v, ex);
    double f2 = g2 + std::max(lead + lb, ax);
    if (over(f2)) return;
    uint64_t lp2 = pack(lam2.data());
    auto key = std::make_pair((uint64_t(si) << 32) | uint32_t(ed.v), lp2);
    auto f_it = index.find(key);
    if (f_it != index.end()) {
      Node& old = nodes[f_it->second];
      if (old.closed || g2 >= old.g) return;
      old.g = g2;
      old.parent = parent;
      old.via = e;
      pq.push({f2, g2, f_it->second, ex});
      return;
    }
    int id = (int)nodes.size();
    nodes.push_back({si, ed.v, parent, e, g2, lp2, false});
    index.emplace(key, id);
    pq.push({f2, g2, id, ex});
  };

  for (int si = 0; si < (int)sources.size() && through; ++si) {
    int id = (int)nodes.size();
    nodes.push_back({si, sources[si], -1, -1, 0.0, pack(std::vector<long long>(b, 0).data()), false});
    index.emplace(std::make_pair((uint64_t(si) << 32) | uint32_t(sources[si]), nodes.back().lam), id);
    pq.push({0.0, 0.0, id, false});
  }
  for (int si = 0; si < (int)sources.size() && !through; ++si) {
    int m = sources[si];
    for (const int* p = s_.out_begin(m); p != s_.out_end(m); ++p) {
      const long long* l = s_.label_ptr(*p);
      if (sg * l[cut] <= 0) continue;
      bool inwin = true;
      for (int k = 0; k < b; ++k) {
        lam2[k] = l[k];
        if (std::llabs(lam2[k]) > R) inwin = false;
      }
      if (inwin) relax(si, -1, *p, s_.edge(*p).length);
    }
  }

  int found = -1;
  bool budget_hit = false;
  double frontier = INFINITY;
  size_t expanded = 0;
  while (!pq.empty()) {
    QItem it = pq.top();
    pq.pop();
    if (nodes[it.node].closed || it.g != nodes[it.node].g) continue;
    if (over(it.f)) break;
    const int si = nodes[it.node].src;
    const int v = nodes[it.node].v;
    const double g = nodes[it.node].g;
    const uint64_t lp = nodes[it.node].lam;
    if (!it.exact) {
      RevSearch& rs = rev(si);
      unpack(lp, lam.data());
      double lead;
      double ax = h_static(sources[si], v, lam.data(), lead);
      double next = pq.empty() ? U : std::min(U, pq.top().f);
      rs.advance(s_, cov->reduced, v, std::max(next, it.f) - g - lead);
      bool ex;
      double lb = rs.lower(v, ex);
      double f = g + std::max(lead + lb, ax);
      if (over(f)) continue;
      pq.push({std::max(f, it.f), g, it.node, ex});
      continue;
    }
    if (v == sources[si] && lp == zpack) {
      found = it.node;
      break;
    }
    nodes[it.node].closed = true;
    if (++expanded > budget) {
      budget_hit = true;
      frontier = it.f;
      break;
    }
    unpack(lp, lam.data());
    for (const int* p = s_.out_begin(v); p != s_.out_end(v); ++p) {
      const long long* l = s_.label_ptr(*p);
      bool inwin = true;
      for (int k = 0; k < b; ++k) {
        lam2[k] = lam[k] + l[k];
        if (std::llabs(lam2[k]) > R) inwin = false;
      }
      if (inwin) relax(si, it.node, *p, g + s_.edge(*p).length);
    }
  }
  res.states_expanded = expanded;

  std::vector<int> loop;
  if (found >= 0) {
    for (int x = found; x >= 0 && nodes[x].via >= 0; x = nodes[x].parent) loop.push_back(nodes[x].via);
    std::reverse(loop.begin(), loop.end());
    if (through) {
      res.loop = loop;
      res.length = walk_length(s_, loop);
      res.optimal_certified = true;
      res.lower_bound = res.length;
      return res;
    }
    loop = least_rotation(loop);
    if (!known.empty()) {
      auto kr = least_rotation(known);
      double a = walk_length(s_, loop), c = walk_length(s_, kr);
      if (c < a - 1e-12 * a || (std::fabs(c - a) <= 1e-12 * a && kr < loop)) loop = kr;
    }
  } else if (!known.empty()) {
    loop = least_rotation(known);
  } else if (through) {
    res.length = INFINITY;
    res.optimal_certified = false;
    return res;
  } else {
    throw std::runtime_error("no loop found for class " + format_vec(z) + " within the state budget");
  }
  res.loop = loop;
  res.length = walk_length(s_, loop);
  res.optimal_certified = !budget_hit && (found >= 0 || U0 <= cap);
  res.lower_bound = res.optimal_certified ? res.length : std::min(res.length, budget_hit ? frontier : cap);
  if (budget_hit) res.warning = "state budget exceeded; best loop found is returned";
  else if (found < 0 && U0 > cap) res.warning = "no loop within the length cap; constructive loop returned";
  if (lift_path(s_, res.loop) != z) throw std::logic_error("loop does not represent the class");
  return res;
}

MinimalLengthResult minimal_length(const PeriodicSpace& s, const IVec& z, const ConstantsLedger* ledger) {
  HomologySolver solver(s);
  return solver.minimal_length(z, ledger);
}

QuasiNorm graph_quasinorm(HomologySolver& solver, double delta) {
  QuasiNorm q;
  q.rank = solver.space().rank();
  q.evaluate = [&solver](const IVec& z) { return solver.N(z); };
  q.delta = delta;
  q.subhomogeneous = true;
  return q;
}

double stable_lower_bound(HomologySolver& solver, const IVec& y) {
  int b = solver.space().rank();
  double best = 0;
  for (const auto& om : coordinate_and_diagonal_covectors(b, false))
    best = std::max(best, solver.covector(om).c * std::fabs(dot(om, y)));
  return best;
}

ConstantsLedger compute_constants(HomologySolver& solver, const std::map<IVec, double>& bootstrap_stable,
                                  size_t lattice_point_budget) {
  const PeriodicSpace& s = solver.space();
  const int b = s.rank();
  ConstantsLedger L;
  L.diam = quotient_diameter(s);
  std::vector<double> unit(b);
  for (int k = 0; k < b; ++k) {
    IVec e(b, 0);
    e[k] = 1;
    auto it = bootstrap_stable.find(e);
    if (it == bootstrap_stable.end()) throw std::invalid_argument("bootstrap estimates must cover the unit vectors");
    unit[k] = it->second;
  }
  for (int e = 0; e < s.num_edges(); ++e) {
    const long long* l = s.label_ptr(e);
    IVec lab(l, l + b);
    auto it = bootstrap_stable.find(lab);
    double up;
    if (it != bootstrap_stable.end() && !s.has_cover_positions()) {
      up = it->second;
    } else {
      RVec d = s.cover_displacement(e);
      up = 0;
      for (int k = 0; k < b; ++k) up += std::fabs(d[k]) * unit[k];
    }
    L.J = std::max(L.J, up / s.edge(e).length);
  }
  L.k_radius = L.J * (b + 1) / 2.0 * L.diam;
  // box from the coordinate covectors: ||y|| >= c_k |y_k|
  std::vector<long long> box(b);
  double points = 1;
  for (int k = 0; k < b; ++k) {
    RVec e(b, 0.0);
    e[k] = 1;
    double ck = solver.covector(e).c;
    if (!(ck > 0)) throw std::runtime_error("coordinate covector is degenerate");
    box[k] = (long long)std::floor(L.k_radius / ck + 1e-9);
    points *= double(2 * box[k] + 1);
  }
  if (points > 50.0 * double(lattice_point_budget)) throw std::length_error("K enumeration ball exceeds the lattice-point budget");
  std::vector<IVec> ys;
  IVec y(b);
  for (int k = 0; k < b; ++k) y[k] = -box[k];
  while (true) {
    if (!is_zero(y) && is_canonical_sign(y) && stable_lower_bound(solver, y) <= L.k_radius) ys.push_back(y);
    int k = b - 1;
    while (k >= 0 && y[k] == box[k]) {
      y[k] = -box[k];
      --k;
    }
    if (k < 0) break;
    ++y[k];
  }
  if (ys.size() > lattice_point_budget) throw std::length_error("K enumeration ball exceeds the lattice-point budget");
  // small classes first so larger ones get good constructive bounds
  std::stable_sort(ys.begin(), ys.end(), [](const IVec& a, const IVec& c) { return norm_l1(a) < norm_l1(c); });
  // Searched values only for sup-norm-1 classes and multiples of unit vectors;
  // everything else through N(a + c) <= N(a) + N(c) + 2 diam (two loops joined
  // by a connector there and back), a running over the sign sub-patterns of y.
  // This bounds K from above, which keeps D valid.
  std::map<IVec, double> U;
  auto lookup = [&](const IVec& q) -> double {
    auto it = U.find(is_canonical_sign(q) ? q : neg(q));
    return it == U.end() ? INFINITY : it->second;
  };
  for (const auto& q : ys) {
    int nonzero = 0;
    for (long long c : q) nonzero += c != 0;
    double best = INFINITY;
    if (norm_inf(q) <= 1 || nonzero == 1) {
      auto r = solver.minimal_length(q);
      best = r.length;
      L.k_certified = L.k_certified && r.optimal_certified;
    } else {
      L.k_certified = false;
      IVec a(b, 0);
      // enumerate sign sub-patterns of q
      std::vector<int> support;
      for (int k = 0; k < b; ++k)
        if (q[k] != 0) support.push_back(k);
      for (unsigned mask = 1; mask < (1u << support.size()); ++mask) {
        for (int k = 0; k < b; ++k) a[k] = 0;
        for (size_t j = 0; j < support.size(); ++j)
          if (mask >> j & 1u) a[support[j]] = q[support[j]] > 0 ? 1 : -1;
        IVec rest = sub(q, a);
        if (is_zero(rest)) continue;
        best = std::min(best, lookup(a) + lookup(rest) + 2.0 * L.diam);
      }
    }
    if (!std::isfinite(best)) throw std::logic_error("K enumeration: no bound for a lattice point");
    U[q] = best;
    L.K = std::max(L.K, best);
  }
  L.k_points = ys.size();
  L.D = ConstantsLedger::assemble(b, L.diam, L.K);
  return L;
}

}  // namespace sn
