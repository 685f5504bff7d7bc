#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>

#include "obstacle/errors.hpp"
#include "obstacle/parallel.hpp"

namespace obstacle {

/// Least-squares fit of y on 1, z, ..., z^degree with z the standardized
/// regressor, optionally with one extra feature column g (for example the
/// obstacle at each path point). Normal equations are accumulated per path
/// block and combined in block order.
template <typename Scalar>
class PolynomialRegression {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  PolynomialRegression() = default;

  /// Fits every response column of `ys` (one column per response) against x.
  template <typename XExpr, typename YExpr>
  PolynomialRegression(const XExpr& x, const YExpr& ys, int degree, int threads = 1)
      : PolynomialRegression(x, ys, Vector(), degree, threads) {}

  /// As above with the extra feature `g` (empty for none).
  template <typename XExpr, typename YExpr>
  PolynomialRegression(const XExpr& x, const YExpr& ys, const Vector& g, int degree, int threads) {
    const Eigen::Index m = x.size();
    mean_ = x.mean();
    const Scalar var = (x.array() - mean_).square().sum() / static_cast<Scalar>(m);
    scale_ = var > Scalar(0) ? std::sqrt(var) : Scalar(1);
    // a spread at the level of summation round-off means all x coincide
    const Scalar floor = Scalar(1e-10) * (Scalar(1) + std::abs(mean_));
    degree_ = var > floor * floor ? degree : 0;
    extra_ = g.size() == m && degree_ > 0 && g.allFinite();
    // an extra feature spanned by the polynomials (a constant or quadratic
    // obstacle) makes the system singular; drop it and refit
    if (fit(x, ys, g, threads)) return;
    if (extra_) {
      extra_ = false;
      if (fit(x, ys, g, threads)) return;
    }
    throw Error(ErrorCode::RegressionSingular, "regression Gram matrix is rank-deficient");
  }

  int degree() const { return degree_; }
  const Matrix& coefficients() const { return coef_; }

  /// Fitted value of response `column` at x.
  Scalar operator()(Scalar x, Eigen::Index column = 0) const { return (*this)(x, Scalar(0), column); }

  /// Fitted value with the extra feature equal to g; g is ignored when the
  /// fit has no extra feature.
  Scalar operator()(Scalar x, Scalar g, Eigen::Index column) const {
    const Scalar z = (x - mean_) / scale_;
    Scalar acc = Scalar(0);
    for (int j = degree_; j >= 0; --j) acc = acc * z + coef_(j, column);
    if (extra_) acc += g * coef_(degree_ + 1, column);
    return acc;
  }

 private:
  template <typename XExpr, typename YExpr>
  bool fit(const XExpr& x, const YExpr& ys, const Vector& g, int threads) {
    const Eigen::Index m = x.size();
    const int p = degree_ + 1 + (extra_ ? 1 : 0);
    const Eigen::Index responses = ys.cols();
    const int blocks = block_count(m);
    std::vector<Matrix> gram(blocks, Matrix::Zero(p, p));
    std::vector<Matrix> rhs(blocks, Matrix::Zero(p, responses));
    for_each_block(blocks, threads, [&](int b) {
      const Eigen::Index lo = static_cast<Eigen::Index>(b) * kPathBlock;
      const Eigen::Index hi = std::min<Eigen::Index>(m, lo + kPathBlock);
      Vector phi(p);
      for (Eigen::Index j = lo; j < hi; ++j) {
        basis(x(j), extra_ ? g(j) : Scalar(0), phi);
        gram[b].noalias() += phi * phi.transpose();
        rhs[b].noalias() += phi * ys.row(j);
      }
    });
    Matrix G = Matrix::Zero(p, p);
    Matrix R = Matrix::Zero(p, responses);
    for (int b = 0; b < blocks; ++b) {
      G += gram[b];
      R += rhs[b];
    }
    Eigen::LDLT<Matrix> ldlt(G);
    const auto d = ldlt.vectorD().cwiseAbs();
    if (ldlt.info() != Eigen::Success || !(d.minCoeff() > Scalar(1e-12) * d.maxCoeff())) return false;
    coef_ = ldlt.solve(R);
    return true;
  }

  void basis(Scalar x, Scalar g, Vector& phi) const {
    const Scalar z = (x - mean_) / scale_;
    Scalar v = Scalar(1);
    for (int j = 0; j <= degree_; ++j) {
      phi(j) = v;
      v *= z;
    }
    if (extra_) phi(degree_ + 1) = g;
  }

  Scalar mean_ = Scalar(0);
  Scalar scale_ = Scalar(1);
  int degree_ = 0;
  bool extra_ = false;
  Matrix coef_;
};

}  // namespace obstacle
