// base.cc - Exact numeral parsing, rational linear algebra, and hashing
// helpers shared across the library.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fusion/rational.hpp"
#include "fusion/util.hpp"
#include "fusion/vec.hpp"

namespace fusion {

Rat rat_from_string(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw std::invalid_argument("empty numeral");

  auto slash = s.find('/');
  if (slash != std::string::npos) {
    mpq_class q;
    if (q.set_str(s, 10) != 0) throw std::invalid_argument("bad rational numeral: " + text);
    if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + text);
    q.canonicalize();
    return q;
  }

  bool negative = false;
  std::size_t pos = 0;
  if (s[pos] == '+' || s[pos] == '-') {
    negative = (s[pos] == '-');
    ++pos;
  }
  std::string digits;
  long frac_digits = 0;
  bool seen_dot = false, seen_digit = false;
  long exp10 = 0;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (c == '.') {
      if (seen_dot) throw std::invalid_argument("bad numeral: " + text);
      seen_dot = true;
    } else if (c == 'e' || c == 'E') {
      exp10 = std::stol(s.substr(pos + 1));
      break;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      digits += c;
      seen_digit = true;
      if (seen_dot) ++frac_digits;
    } else {
      throw std::invalid_argument("bad numeral: " + text);
    }
  }
  if (!seen_digit) throw std::invalid_argument("bad numeral: " + text);
  mpz_class mant(digits.empty() ? "0" : digits, 10);
  Rat value(mant);
  long net = exp10 - frac_digits;
  if (net > 0) {
    mpz_class p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(net));
    value *= Rat(p10);
  } else if (net < 0) {
    mpz_class p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(-net));
    value /= Rat(p10);
  }
  if (negative) value = -value;
  value.canonicalize();
  return value;
}

Rat sqrt_upper(const Rat& q) {
  if (q <= 0) return 0;
  const Rat inflate(1000000001, 1000000000);
  Rat s = rat_from_double(std::sqrt(to_double(q))) * inflate;
  if (s <= 0) s = Rat(1);
  while (s * s < q) s *= inflate;
  return s;
}

Rat sqrt_lower(const Rat& q) {
  if (q <= 0) return 0;
  const Rat deflate(1000000000, 1000000001);
  Rat s = rat_from_double(std::sqrt(to_double(q))) * deflate;
  if (s <= 0) s = Rat(q) / sqrt_upper(q);  // q/sqrt_upper(q) <= sqrt(q)
  while (s * s > q) s *= deflate;
  return s;
}

std::size_t rat_rank(std::vector<Vec> rows) {
  if (rows.empty()) return 0;
  const std::size_t ncols = rows[0].size();
  std::size_t rank = 0;
  std::size_t col = 0;
  for (std::size_t r = 0; r < rows.size() && col < ncols; ++col) {
    std::size_t piv = r;
    while (piv < rows.size() && sgn(rows[piv][col]) == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[r], rows[piv]);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || sgn(rows[i][col]) == 0) continue;
      Rat f = rows[i][col] / rows[r][col];
      for (std::size_t j = col; j < ncols; ++j) rows[i][j] -= f * rows[r][j];
    }
    ++r;
    ++rank;
  }
  return rank;
}

bool rat_solve(std::vector<Vec> M, Vec rhs, Vec& out) {
  const std::size_t n = M.size();
  for (std::size_t i = 0; i < n; ++i)
    if (M[i].size() != n) return false;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && sgn(M[piv][col]) == 0) ++piv;
    if (piv == n) return false;
    std::swap(M[col], M[piv]);
    std::swap(rhs[col], rhs[piv]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col || sgn(M[i][col]) == 0) continue;
      Rat f = M[i][col] / M[col][col];
      for (std::size_t j = col; j < n; ++j) M[i][j] -= f * M[col][j];
      rhs[i] -= f * rhs[col];
    }
  }
  out.assign(n, Rat(0));
  for (std::size_t i = 0; i < n; ++i) out[i] = rhs[i] / M[i][i];
  return true;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

}  // namespace fusion
