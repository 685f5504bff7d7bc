#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the library's solvers.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace oracle {

/// Cox-Ross-Rubinstein tree for an American put on S0 with log volatility
/// sqrt(variance).
inline double crr_american_put(double s0, double strike, double rate, double variance,
                               double horizon, int steps) {
  const double dt = horizon / steps;
  const double up = std::exp(std::sqrt(variance * dt));
  const double down = 1.0 / up;
  const double q = (std::exp(rate * dt) - down) / (up - down);
  const double disc = std::exp(-rate * dt);
  std::vector<double> v(steps + 1);
  for (int j = 0; j <= steps; ++j) {
    v[j] = std::max(strike - s0 * std::pow(up, steps - 2 * j), 0.0);
  }
  for (int n = steps - 1; n >= 0; --n) {
    for (int j = 0; j <= n; ++j) {
      const double cont = disc * (q * v[j] + (1.0 - q) * v[j + 1]);
      v[j] = std::max(strike - s0 * std::pow(up, n - 2 * j), cont);
    }
  }
  return v[0];
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double gaussian_pdf(double x, double mean, double variance) {
  const double d = x - mean;
  return std::exp(-d * d / (2.0 * variance)) / std::sqrt(2.0 * M_PI * variance);
}

/// E[exp(-(x + W_tau)^2 / (2 w^2))] for W_tau ~ N(0, tau): heat flow of a
/// Gaussian bump.
inline double heat_gaussian(double x, double width, double tau) {
  const double s2 = width * width;
  return std::sqrt(s2 / (s2 + tau)) * std::exp(-x * x / (2.0 * (s2 + tau)));
}

/// Solves the complementarity problem x >= l, Mx - b >= 0, (x - l)'(Mx - b) = 0
/// by enumerating every active set. Exponential; intended for n <= 12.
inline Eigen::VectorXd brute_force_lcp(const Eigen::MatrixXd& M, const Eigen::VectorXd& b,
                                       const Eigen::VectorXd& l, double tol = 1e-10) {
  const int n = static_cast<int>(b.size());
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    // mask bit set: x_i = l_i (active); otherwise (Mx - b)_i = 0
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        A(i, i) = 1.0;
        rhs(i) = l(i);
      } else {
        A.row(i) = M.row(i);
        rhs(i) = b(i);
      }
    }
    const Eigen::VectorXd x = A.fullPivLu().solve(rhs);
    const Eigen::VectorXd w = M * x - b;
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      ok = x(i) >= l(i) - tol && w(i) >= -tol && std::abs((x(i) - l(i)) * w(i)) <= tol;
    }
    if (ok) return x;
  }
  return Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
}

}  // namespace oracle
