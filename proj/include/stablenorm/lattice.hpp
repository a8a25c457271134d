#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sn {

using IVec = std::vector<long long>;
using RVec = std::vector<double>;

// Coordinates of every lattice vector handed to the library must fit in 32 bits.
constexpr long long kCoordLimit = 2147483647LL;

void check_coords(const IVec& z);

IVec add(const IVec& a, const IVec& b);
IVec sub(const IVec& a, const IVec& b);
IVec neg(const IVec& a);
IVec scale(const IVec& a, long long k);
bool is_zero(const IVec& a);
long long norm_inf(const IVec& a);
long long norm_l1(const IVec& a);
double norm_l2(const IVec& a);
double norm_l2(const RVec& a);
double dot(const RVec& a, const RVec& b);
double dot(const RVec& a, const IVec& b);
RVec to_real(const IVec& a);
long long gcd_all(const IVec& a);
bool is_primitive(const IVec& a);

// The sign representative used for caching: first non-zero coordinate positive.
bool is_canonical_sign(const IVec& a);

// All primitive vectors with sup-norm <= radius, lexicographically sorted.
std::vector<IVec> primitive_vectors(int rank, int radius);
// One representative per +-pair (the canonical sign), sorted.
std::vector<IVec> primitive_directions(int rank, int radius);

std::string format_vec(const IVec& a, char sep = ' ');
std::string format_vec(const RVec& a, char sep = ' ', int precision = 17);
IVec parse_ivec(const std::string& text);

struct IVecHash {
  size_t operator()(const IVec& v) const noexcept;
};

}  // namespace sn
