#pragma once

#include <Eigen/Core>
#include <cassert>

namespace obstacle {

/// Tridiagonal matrix stored by diagonals. `lower(i)` multiplies x(i-1) in
/// row i and `upper(i)` multiplies x(i+1); lower(0) and upper(n-1) are unused.
template <typename Scalar>
struct Tridiagonal {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vector lower;
  Vector diag;
  Vector upper;

  Tridiagonal() = default;
  explicit Tridiagonal(Eigen::Index n)
      : lower(Vector::Zero(n)), diag(Vector::Zero(n)), upper(Vector::Zero(n)) {}

  Eigen::Index size() const { return diag.size(); }

  Vector operator*(const Vector& x) const {
    const Eigen::Index n = size();
    Vector y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      Scalar v = diag(i) * x(i);
      if (i > 0) v += lower(i) * x(i - 1);
      if (i + 1 < n) v += upper(i) * x(i + 1);
      y(i) = v;
    }
    return y;
  }

  Tridiagonal transposed() const {
    const Eigen::Index n = size();
    Tridiagonal t(n);
    t.diag = diag;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      t.upper(i) = lower(i + 1);
      t.lower(i + 1) = upper(i);
    }
    return t;
  }

  /// Thomas algorithm. Stable without pivoting for the diagonally dominant
  /// M-matrices assembled in this library.
  Vector solve(const Vector& rhs) const {
    const Eigen::Index n = size();
    assert(rhs.size() == n);
    Vector c(n);
    Vector d(n);
    Scalar denom = diag(0);
    c(0) = n > 1 ? upper(0) / denom : Scalar(0);
    d(0) = rhs(0) / denom;
    for (Eigen::Index i = 1; i < n; ++i) {
      denom = diag(i) - lower(i) * c(i - 1);
      c(i) = i + 1 < n ? upper(i) / denom : Scalar(0);
      d(i) = (rhs(i) - lower(i) * d(i - 1)) / denom;
    }
    Vector x(n);
    x(n - 1) = d(n - 1);
    for (Eigen::Index i = n - 2; i >= 0; --i) x(i) = d(i) - c(i) * x(i + 1);
    return x;
  }

  Vector solve_transposed(const Vector& rhs) const { return transposed().solve(rhs); }

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> dense() const {
    const Eigen::Index n = size();
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      m(i, i) = diag(i);
      if (i > 0) m(i, i - 1) = lower(i);
      if (i + 1 < n) m(i, i + 1) = upper(i);
    }
    return m;
  }
};

}  // namespace obstacle
