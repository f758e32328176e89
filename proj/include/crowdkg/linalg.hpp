#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "crowdkg/errors.hpp"

// Just enough dense linear algebra for low-dimensional Gaussian beliefs.
// Matrices are row-major and square.

namespace crowdkg {

using Vec = std::vector<double>;

class Mat {
 public:
  Mat() = default;
  explicit Mat(std::size_t n) : n_(n), d_(n * n, 0.0) {}

  static Mat identity(std::size_t n) {
    Mat m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return d_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }

 private:
  std::size_t n_ = 0;
  std::vector<double> d_;
};

inline double dot(const Vec& x, const Vec& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

inline double norm2(const Vec& x) { return std::sqrt(dot(x, x)); }

inline Vec matvec(const Mat& m, const Vec& x) {
  Vec y(m.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m.size(); ++j) s += m(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

inline double quad_form(const Mat& m, const Vec& x) { return dot(x, matvec(m, x)); }

// Lower Cholesky factor; throws numeric_error when the matrix is not
// positive-definite.
inline Mat cholesky(const Mat& m) {
  const std::size_t n = m.size();
  Mat l(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (!(s > 0.0)) throw numeric_error("matrix is not positive-definite");
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return l;
}

// Solves (L L') x = b given the lower factor L.
inline Vec chol_solve(const Mat& l, Vec b) {
  const std::size_t n = l.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) b[i] -= l(i, k) * b[k];
    b[i] /= l(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t k = ii + 1; k < n; ++k) b[ii] -= l(k, ii) * b[k];
    b[ii] /= l(ii, ii);
  }
  return b;
}

inline Mat inverse_spd(const Mat& m) {
  const std::size_t n = m.size();
  const Mat l = cholesky(m);
  Mat inv(n);
  for (std::size_t j = 0; j < n; ++j) {
    Vec e(n, 0.0);
    e[j] = 1.0;
    const Vec col = chol_solve(l, std::move(e));
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

}  // namespace crowdkg
