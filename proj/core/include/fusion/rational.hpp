// rational.hpp - Exact rational scalar type (GMP mpq_class) plus parsing and
// formatting helpers shared by every module. Values are canonicalized on
// construction; arithmetic through mpq_class stays canonical automatically.
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fusion {

using Rat = mpq_class;

inline double to_double(const Rat& r) { return r.get_d(); }

// Exact conversion: every finite double is a dyadic rational.
inline Rat rat_from_double(double x) {
  Rat r(x);
  r.canonicalize();
  return r;
}

// Canonical "p" or "p/q" form with q > 0.
inline std::string rat_to_string(const Rat& r) { return r.get_str(); }

// Parses "3/8", "-2", "0.375", "1.25e-2" style numerals into an exact rational.
// Decimal and exponent forms are expanded exactly (never routed through double).
Rat rat_from_string(const std::string& text);

// Conservative rational bounds on sqrt(q): sqrt_upper(q)^2 >= q and
// sqrt_lower(q)^2 <= q, with sqrt_lower(q) > 0 whenever q > 0. Negative
// inputs map to 0.
Rat sqrt_upper(const Rat& q);
Rat sqrt_lower(const Rat& q);

template <typename T>
T to_scalar(const Rat& r);
template <>
inline double to_scalar<double>(const Rat& r) {
  return r.get_d();
}
template <>
inline Rat to_scalar<Rat>(const Rat& r) {
  return r;
}

template <typename T>
struct ScalarTraits;
template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
};
template <>
struct ScalarTraits<Rat> {
  static constexpr bool exact = true;
};

}  // namespace fusion
