// vec.hpp - Small dense vector helpers over exact rationals (and doubles),
// plus the pivoted-elimination rank used by affine-independence tests.
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "fusion/rational.hpp"

namespace fusion {

using Vec = std::vector<Rat>;    // a point or direction in R^n, exact
using DVec = std::vector<double>;

inline DVec to_dvec(const Vec& v) {
  DVec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = to_double(v[i]);
  return out;
}

inline Vec vadd(const Vec& a, const Vec& b) {
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

inline Vec vsub(const Vec& a, const Vec& b) {
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

inline Vec vscale(const Rat& s, const Vec& a) {
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = s * a[i];
  return out;
}

inline Rat vdot(const Vec& a, const Vec& b) {
  Rat acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

// Squared Euclidean norm; exact, so sign and comparison tests stay rational
// even when the distance itself is irrational.
inline Rat vnorm2(const Vec& a) { return vdot(a, a); }

inline double vnorm(const Vec& a) { return std::sqrt(to_double(vnorm2(a))); }

inline bool veq(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

// Exact rank by fraction-free-ish Gaussian elimination with full pivoting.
// rows are modified in place.
std::size_t rat_rank(std::vector<Vec> rows);

// Solves the square system M x = rhs exactly; returns false when singular.
bool rat_solve(std::vector<Vec> M, Vec rhs, Vec& out);

}  // namespace fusion
