#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

#include "cbia/errors.hpp"

namespace cbia {

using Rational = mpq_class;

/// "num/den", or just "num" when the denominator is 1.
inline std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline Rational parse_rational(std::string_view text) {
  Rational q;
  if (text.empty() || q.set_str(std::string(text), 10) != 0 || q.get_den() == 0) {
    throw InvalidParameter("not a rational: '" + std::string(text) + "'");
  }
  q.canonicalize();
  return q;
}

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
  Rational q(mpz_class(std::to_string(num)), mpz_class(std::to_string(den)));
  q.canonicalize();
  return q;
}

inline double to_double(const Rational& q) { return q.get_d(); }

/// Closest fraction with denominator at most `max_den` (Stern-Brocot walk).
inline Rational nearest_fraction(double x, long max_den) {
  bool negative = x < 0;
  if (negative) x = -x;
  long lo_n = 0, lo_d = 1, hi_n = 1, hi_d = 0;
  while (true) {
    long mid_n = lo_n + hi_n, mid_d = lo_d + hi_d;
    if (mid_d > max_den) break;
    if (static_cast<double>(mid_n) < x * static_cast<double>(mid_d)) {
      lo_n = mid_n, lo_d = mid_d;
    } else {
      hi_n = mid_n, hi_d = mid_d;
    }
  }
  Rational best = make_rational(lo_n, lo_d);
  if (hi_d != 0) {
    double e_lo = x - static_cast<double>(lo_n) / lo_d;
    double e_hi = static_cast<double>(hi_n) / hi_d - x;
    if (e_hi < e_lo) best = make_rational(hi_n, hi_d);
  }
  return negative ? Rational(-best) : best;
}

}  // namespace cbia
