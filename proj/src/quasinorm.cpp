#include "stablenorm/quasinorm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace sn {

std::vector<long long> homogenization_schedule(long long k_max) {
  if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
  std::vector<long long> ks;
  for (long long k = 1; k < k_max - 1; k *= 2) ks.push_back(k);
  if (k_max >= 2 && (ks.empty() || ks.back() < k_max - 1)) ks.push_back(k_max - 1);
  ks.push_back(k_max);
  return ks;
}

HomogenizationResult homogenize(const QuasiNorm& qn, const IVec& z, double tol, long long k_max) {
  if ((int)z.size() != qn.rank) throw std::invalid_argument("rank mismatch");
  if (!(tol > 0)) throw std::invalid_argument("tol must be positive");
  if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
  check_coords(scale(z, k_max));

  HomogenizationResult r;
  r.direction = z;
  r.value = INFINITY;
  auto ks = homogenization_schedule(k_max);
  double prev = NAN;
  bool converged = false;
  for (size_t i = 0; i < ks.size(); ++i) {
    long long k = ks[i];
    double nk = qn.evaluate(scale(z, k));
    double q = (nk + qn.delta) / double(k);
    r.trace.push_back({k, nk, q});
    r.value = std::min(r.value, q);
    r.k_used = k;
    if (!std::isnan(prev)) {
      r.residual = std::fabs(prev - q);
      // tolerance check only on the doubling part; the tail pair is the budget stop
      if (r.residual <= tol && k < k_max - 1) {
        converged = true;
        break;
      }
    }
    prev = q;
  }
  if (ks.size() == 1) r.residual = 0.0;
  r.reached_k_max = !converged && r.residual > tol;
  r.hi = r.value;
  r.lo = r.value - r.residual;
  return r;
}

double estimate_doubling_constant(const QuasiNorm& qn, const std::vector<IVec>& sample) {
  if (sample.empty()) throw std::invalid_argument("empty sample");
  double d = 0.0;
  for (const auto& z : sample) {
    if ((int)z.size() != qn.rank) throw std::invalid_argument("rank mismatch");
    d = std::max(d, 2.0 * qn.evaluate(z) - qn.evaluate(scale(z, 2)));
  }
  return d;
}

AxiomReport verify_quasinorm_axioms(const QuasiNorm& qn,
                                    const std::vector<std::pair<IVec, IVec>>& pairs) {
  AxiomReport rep;
  IVec zero(qn.rank, 0);
  double n0 = qn.evaluate(zero);
  if (n0 != 0.0) rep.violations.push_back({"definiteness", zero, zero, n0, 0.0});
  auto slack = [](double a, double b) { return 1e-12 * std::max({1.0, std::fabs(a), std::fabs(b)}); };
  for (const auto& [z, w] : pairs) {
    if ((int)z.size() != qn.rank || (int)w.size() != qn.rank)
      throw std::invalid_argument("rank mismatch");
    ++rep.pairs_checked;
    double nz = qn.evaluate(z), nw = qn.evaluate(w);
    for (const IVec* v : {&z, &w}) {
      double nv = (v == &z) ? nz : nw;
      if (!is_zero(*v) && !(nv > 0)) rep.violations.push_back({"definiteness", *v, zero, nv, 0.0});
      double nm = qn.evaluate(neg(*v));
      if (std::fabs(nm - nv) > slack(nm, nv))
        rep.violations.push_back({"symmetry", *v, neg(*v), nv, nm});
    }
    double nzw = qn.evaluate(add(z, w));
    double rhs = nz + nw + qn.delta;
    if (nzw > rhs + slack(nzw, rhs)) rep.violations.push_back({"quasi-triangle", z, w, nzw, rhs});
  }
  return rep;
}

std::vector<std::pair<IVec, IVec>> random_pairs(int rank, int radius, size_t count,
                                                std::mt19937_64& rng) {
  std::uniform_int_distribution<long long> coord(-radius, radius);
  auto draw = [&] {
    IVec v(rank);
    do {
      for (auto& c : v) c = coord(rng);
    } while (is_zero(v));
    return v;
  };
  std::vector<std::pair<IVec, IVec>> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    IVec a = draw();
    IVec b = draw();
    out.emplace_back(std::move(a), std::move(b));
  }
  return out;
}

double default_delta(const QuasiNorm& qn, const std::vector<std::pair<IVec, IVec>>& pairs) {
  double worst = 0.0;
  for (const auto& [z, w] : pairs)
    worst = std::max(worst, qn.evaluate(add(z, w)) - qn.evaluate(z) - qn.evaluate(w));
  return 2.0 * worst;
}

WordNorm::WordNorm(std::vector<IVec> generators, size_t state_budget) : budget_(state_budget) {
  if (generators.empty()) throw std::invalid_argument("empty generator set");
  rank_ = (int)generators.front().size();
  for (auto& g : generators) {
    if ((int)g.size() != rank_) throw std::invalid_argument("rank mismatch");
    if (is_zero(g)) continue;
    for (const IVec& s : {g, neg(g)})
      if (std::find(gens_.begin(), gens_.end(), s) == gens_.end()) gens_.push_back(s);
  }
  std::sort(gens_.begin(), gens_.end());
}

// Bidirectional breadth-first search in the Cayley graph of Z^b.
long long WordNorm::length(const IVec& z) const {
  if ((int)z.size() != rank_) throw std::invalid_argument("rank mismatch");
  if (is_zero(z)) return 0;
  std::unordered_map<IVec, long long, IVecHash> da, db;
  std::vector<IVec> fa{IVec(rank_, 0)}, fb{z};
  da[fa[0]] = 0;
  db[z] = 0;
  long long ra = 0, rb = 0;
  while (!fa.empty() && !fb.empty()) {
    if (da.size() + db.size() > budget_)
      throw std::runtime_error("word length search exceeded its state budget");
    bool grow_a = fa.size() <= fb.size();
    auto& front = grow_a ? fa : fb;
    auto& mine = grow_a ? da : db;
    auto& other = grow_a ? db : da;
    long long& r = grow_a ? ra : rb;
    std::vector<IVec> next;
    long long best = -1;
    for (const auto& p : front)
      for (const auto& s : gens_) {
        IVec q = add(p, s);
        if (mine.count(q)) continue;
        mine[q] = r + 1;
        auto it = other.find(q);
        if (it != other.end()) {
          long long tot = r + 1 + it->second;
          if (best < 0 || tot < best) best = tot;
        }
        next.push_back(std::move(q));
      }
    ++r;
    if (best >= 0) return best;
    front = std::move(next);
  }
  throw std::runtime_error("generators do not reach the class");
}

QuasiNorm WordNorm::as_quasinorm() const {
  QuasiNorm q;
  q.rank = rank_;
  q.evaluate = [this](const IVec& z) { return double(length(z)); };
  q.delta = 0.0;
  q.subhomogeneous = true;
  return q;
}

}  // namespace sn
