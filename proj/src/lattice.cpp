#include "stablenorm/lattice.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace sn {

void check_coords(const IVec& z) {
  for (long long c : z)
    if (c > kCoordLimit || c < -kCoordLimit)
      throw std::out_of_range("lattice coordinate outside the 32-bit range");
}

static void same_rank(const IVec& a, const IVec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("rank mismatch");
}

IVec add(const IVec& a, const IVec& b) {
  same_rank(a, b);
  IVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

IVec sub(const IVec& a, const IVec& b) {
  same_rank(a, b);
  IVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

IVec neg(const IVec& a) {
  IVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
  return r;
}

IVec scale(const IVec& a, long long k) {
  IVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] * k;
  return r;
}

bool is_zero(const IVec& a) {
  for (long long c : a)
    if (c != 0) return false;
  return true;
}

long long norm_inf(const IVec& a) {
  long long m = 0;
  for (long long c : a) m = std::max(m, std::llabs(c));
  return m;
}

long long norm_l1(const IVec& a) {
  long long s = 0;
  for (long long c : a) s += std::llabs(c);
  return s;
}

double norm_l2(const IVec& a) {
  double s = 0;
  for (long long c : a) s += double(c) * double(c);
  return std::sqrt(s);
}

double norm_l2(const RVec& a) {
  double s = 0;
  for (double c : a) s += c * c;
  return std::sqrt(s);
}

double dot(const RVec& a, const RVec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("rank mismatch");
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double dot(const RVec& a, const IVec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("rank mismatch");
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * double(b[i]);
  return s;
}

RVec to_real(const IVec& a) { return RVec(a.begin(), a.end()); }

long long gcd_all(const IVec& a) {
  long long g = 0;
  for (long long c : a) g = std::gcd(g, std::llabs(c));
  return g;
}

bool is_primitive(const IVec& a) { return gcd_all(a) == 1; }

bool is_canonical_sign(const IVec& a) {
  for (long long c : a)
    if (c != 0) return c > 0;
  return true;
}

std::vector<IVec> primitive_vectors(int rank, int radius) {
  std::vector<IVec> out;
  if (rank <= 0 || radius <= 0) return out;
  IVec v(rank, -radius);
  while (true) {
    if (is_primitive(v)) out.push_back(v);
    int k = rank - 1;
    while (k >= 0 && v[k] == radius) v[k--] = -radius;
    if (k < 0) break;
    ++v[k];
  }
  return out;
}

std::vector<IVec> primitive_directions(int rank, int radius) {
  std::vector<IVec> out;
  for (auto& v : primitive_vectors(rank, radius))
    if (is_canonical_sign(v)) out.push_back(v);
  return out;
}

std::string format_vec(const IVec& a, char sep) {
  std::string s;
  for (size_t i = 0; i < a.size(); ++i) {
    if (i) s += sep;
    s += std::to_string(a[i]);
  }
  return s;
}

std::string format_vec(const RVec& a, char sep, int precision) {
  std::string s;
  char buf[64];
  for (size_t i = 0; i < a.size(); ++i) {
    if (i) s += sep;
    std::snprintf(buf, sizeof buf, "%.*g", precision, a[i]);
    s += buf;
  }
  return s;
}

IVec parse_ivec(const std::string& text) {
  std::string t = text;
  for (char& c : t)
    if (c == ',' || c == '(' || c == ')' || c == ';' || c == '[' || c == ']') c = ' ';
  std::istringstream in(t);
  IVec v;
  std::string tok;
  while (in >> tok) {
    size_t pos = 0;
    long long x = std::stoll(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("not an integer: " + tok);
    v.push_back(x);
  }
  check_coords(v);
  return v;
}

size_t IVecHash::operator()(const IVec& v) const noexcept {
  uint64_t h = 1469598103934665603ULL;
  for (long long c : v) {
    h ^= uint64_t(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h *= 1099511628211ULL;
  }
  return size_t(h);
}

}  // namespace sn
