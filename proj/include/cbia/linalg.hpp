#pragma once

// Rank computations used by the verifiers: singular-value thresholding over
// complex doubles, and exact Gaussian elimination over the Gaussian
// rationals Q(i).

#include <Eigen/Dense>

#include <complex>
#include <utility>
#include <vector>

#include "cbia/rational.hpp"

namespace cbia {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

/// Number of singular values above `rel_tol` times the largest one.
inline int numeric_rank(const CMatrix& m, double rel_tol) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double cut = rel_tol * s(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cut) ++rank;
  }
  return rank;
}

inline CMatrix hcat(const CMatrix& a, const CMatrix& b) {
  if (a.cols() == 0) return b;
  if (b.cols() == 0) return a;
  CMatrix out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

struct GaussianRational {
  Rational re;
  Rational im;

  GaussianRational() = default;
  GaussianRational(Rational r, Rational i = 0) : re(std::move(r)), im(std::move(i)) {}

  /// Exact value of a double-precision complex number.
  static GaussianRational from(const cplx& z) { return {Rational(z.real()), Rational(z.imag())}; }

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }

  friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend GaussianRational operator/(const GaussianRational& a, const GaussianRational& b) {
    Rational norm = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / norm, (a.im * b.re - a.re * b.im) / norm};
  }
  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re == b.re && a.im == b.im;
  }
};

/// Dense row-major matrix over Q(i).
class QMatrix {
 public:
  QMatrix() = default;
  QMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  GaussianRational& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  const GaussianRational& operator()(int r, int c) const {
    return data_[static_cast<std::size_t>(r) * cols_ + c];
  }

  static QMatrix from(const CMatrix& m) {
    QMatrix q(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
    for (int r = 0; r < q.rows(); ++r)
      for (int c = 0; c < q.cols(); ++c) q(r, c) = GaussianRational::from(m(r, c));
    return q;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<GaussianRational> data_;
};

inline QMatrix hcat(const QMatrix& a, const QMatrix& b) {
  if (a.cols() == 0) return b;
  if (b.cols() == 0) return a;
  QMatrix out(a.rows(), a.cols() + b.cols());
  for (int r = 0; r < a.rows(); ++r) {
    for (int c = 0; c < a.cols(); ++c) out(r, c) = a(r, c);
    for (int c = 0; c < b.cols(); ++c) out(r, a.cols() + c) = b(r, c);
  }
  return out;
}

inline int exact_rank(QMatrix m) {
  int rank = 0;
  for (int col = 0; col < m.cols() && rank < m.rows(); ++col) {
    int pivot = -1;
    for (int r = rank; r < m.rows(); ++r) {
      if (!m(r, col).is_zero()) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) continue;
    if (pivot != rank) {
      for (int c = col; c < m.cols(); ++c) std::swap(m(pivot, c), m(rank, c));
    }
    const GaussianRational inv = GaussianRational(1) / m(rank, col);
    for (int r = rank + 1; r < m.rows(); ++r) {
      if (m(r, col).is_zero()) continue;
      const GaussianRational f = m(r, col) * inv;
      for (int c = col; c < m.cols(); ++c) m(r, c) = m(r, c) - f * m(rank, c);
    }
    ++rank;
  }
  return rank;
}

}  // namespace cbia
