#pragma once

// Dense tableau simplex over exact rationals for
//   maximize c.x  subject to  A x <= b,  x >= 0,  with b >= 0,
// so the slack basis is feasible from the start.

#include <cstddef>
#include <vector>

#include "cbia/errors.hpp"
#include "cbia/rational.hpp"

namespace cbia {

struct LPResult {
  Rational value;
  std::vector<Rational> x;
  std::size_t pivots = 0;
  bool unbounded = false;
};

inline LPResult simplex_maximize(const std::vector<std::vector<Rational>>& A, const std::vector<Rational>& b,
                                 const std::vector<Rational>& c) {
  const std::size_t m = A.size(), n = c.size();
  if (b.size() != m) throw InvalidParameter("LP: rhs size mismatch");
  for (std::size_t i = 0; i < m; ++i) {
    if (A[i].size() != n) throw InvalidParameter("LP: row width mismatch");
    if (sgn(b[i]) < 0) throw InvalidParameter("LP: rhs must be nonnegative");
  }
  const std::size_t width = n + m + 1;  // structural, slack, rhs
  std::vector<std::vector<Rational>> t(m, std::vector<Rational>(width));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t[i][j] = A[i][j];
    t[i][n + i] = 1;
    t[i][width - 1] = b[i];
  }
  // Reduced costs row: z - c.x = 0.
  std::vector<Rational> z(width);
  for (std::size_t j = 0; j < n; ++j) z[j] = -c[j];
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

  LPResult out;
  int degenerate_run = 0;
  constexpr int kBlandAfter = 50;
  std::vector<std::size_t> nz;
  while (true) {
    const bool bland = degenerate_run >= kBlandAfter;
    std::size_t enter = width;
    for (std::size_t j = 0; j + 1 < width; ++j) {
      if (sgn(z[j]) >= 0) continue;
      if (bland) {
        enter = j;
        break;
      }
      if (enter == width || z[j] < z[enter]) enter = j;
    }
    if (enter == width) break;

    std::size_t leave = m;
    Rational best;
    for (std::size_t i = 0; i < m; ++i) {
      if (sgn(t[i][enter]) <= 0) continue;
      Rational ratio = t[i][width - 1] / t[i][enter];
      if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave == m) {
      out.unbounded = true;
      return out;
    }
    degenerate_run = sgn(best) == 0 ? degenerate_run + 1 : 0;

    auto& pr = t[leave];
    const Rational inv = 1 / pr[enter];
    nz.clear();
    for (std::size_t j = 0; j < width; ++j) {
      if (sgn(pr[j]) != 0) {
        pr[j] *= inv;
        nz.push_back(j);
      }
    }
    auto eliminate = [&](std::vector<Rational>& row) {
      if (sgn(row[enter]) == 0) return;
      const Rational f = row[enter];
      for (std::size_t j : nz) row[j] -= f * pr[j];
    };
    for (std::size_t i = 0; i < m; ++i) {
      if (i != leave) eliminate(t[i]);
    }
    eliminate(z);
    basis[leave] = enter;
    ++out.pivots;
  }

  out.value = z[width - 1];
  out.x.assign(n, Rational(0));
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) out.x[basis[i]] = t[i][width - 1];
  }
  return out;
}

}  // namespace cbia
