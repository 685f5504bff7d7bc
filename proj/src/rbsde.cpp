#include <algorithm>
#include <cmath>

#include "obstacle/errors.hpp"
#include "obstacle/parallel.hpp"
#include "obstacle/regression.hpp"
#include "obstacle/stochastic.hpp"

namespace obstacle {

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::ChainDp: return "chain-dp";
    case Scheme::PenalizedMc: return "penalized-mc";
    case Scheme::ReflectedMc: return "reflected-mc";
  }
  return "unknown";
}

RbsdeEstimate rbsde_chain_dp(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                             int s_index, int x_index, const SolverOptions& options) {
  if (s_index < 0 || s_index > grid.nt || x_index < 0 || x_index > grid.nx + 1) {
    throw Error(ErrorCode::ValidationFailure, "chain-dp start outside the grid");
  }
  (void)options;
  const double dt = grid.dt;
  const Field h = obstacle_field(problem, grid);
  RbsdeEstimate est;
  est.scheme = Scheme::ChainDp;
  est.Y = grid.zeros();
  est.Z = grid.zeros();
  est.K = grid.zeros();
  est.running = grid.zeros();

  Vector next(grid.nodes());
  for (int i = 0; i < grid.nodes(); ++i) next(i) = problem.obstacle.phi(grid.x(i));
  est.Y.row(grid.nt) = next.transpose();
  est.Z.row(grid.nt) = scaled_gradient(problem, grid, grid.nt, next).transpose();

  for (int k = grid.nt - 1; k >= 0; --k) {
    const Vector E = transition_kernel(problem, grid, k).expect(next);
    Vector v = E;
    Vector g = driver_slice(problem, grid, k, v);
    if (problem.driver.depends_on_solution()) {
      // proxy for (y, z): fixed point of v = E + dt f(v, sigma D v)
      for (int it = 0;; ++it) {
        const Vector w = E + dt * g;
        const double delta = (w - v).cwiseAbs().maxCoeff();
        v = w;
        g = driver_slice(problem, grid, k, v);
        if (delta <= 1e-14 * (1.0 + v.cwiseAbs().maxCoeff())) break;
        if (it >= 500) throw Error(ErrorCode::InnerDivergence, "chain-dp driver proxy did not converge");
      }
    }
    const Vector C = E + dt * g;
    Vector y(grid.nodes());
    for (int i = 0; i < grid.nodes(); ++i) {
      y(i) = std::max(h(k, i), C(i));
      est.K(k, i) = std::max(0.0, h(k, i) - C(i));
    }
    est.running.row(k) = g.transpose();
    est.Y.row(k) = y.transpose();
    est.Z.row(k) = scaled_gradient(problem, grid, k, y).transpose();
    next = y;
  }
  est.y0.value = est.Y(s_index, x_index);
  est.z0 = est.Z(s_index, x_index);
  return est;
}

namespace {

struct LsmcMode {
  bool penalized = false;
  double n = 0.0;
};

// Backward regression recursion on paths [first, first + count).
//
// The regression only decides where the obstacle binds and feeds the
// driver; the path value itself is either h (stop) or the realized value of
// the next step plus the driver (continue). Fit errors then enter Y0 at
// second order only. Y holds the regressed state value max(h, c'), or its
// penalized analogue, at each path point.
RbsdeEstimate lsmc(const ObstacleProblem& problem, const PathEnsemble& e, long first, long count,
                   LsmcMode mode, int degree, int threads) {
  if (degree < 0 || degree > 6) throw Error(ErrorCode::ValidationFailure, "basis degree must be in [0, 6]");
  const int N = e.steps;
  const long M = count;
  const double dt = e.dt_path;
  RbsdeEstimate est;
  est.scheme = mode.penalized ? Scheme::PenalizedMc : Scheme::ReflectedMc;
  est.n_penalty = mode.n;
  est.degree = degree;
  est.Y.resize(N + 1, M);
  est.Z = Field::Zero(N + 1, M);
  est.K = Field::Zero(N + 1, M);
  est.running = Field::Zero(N + 1, M);
  Field dK = Field::Zero(N, M);
  Vector path(M);
  for (long p = 0; p < M; ++p) {
    est.Y(N, p) = problem.obstacle.phi(e.X(N, first + p));
    path(p) = est.Y(N, p);
  }

  Vector centred(M);
  Vector obstacle_at(M);
  for (int k = N - 1; k >= 0; --k) {
    const double t = e.t(k);
    const auto xs = e.X.row(k).segment(first, M).transpose();
    for (long p = 0; p < M; ++p) obstacle_at(p) = problem.obstacle.h(t, e.X(k, first + p));
    const PolynomialRegression<double> value(xs, path, obstacle_at, degree, threads);
    // Z from the centred response: Y - E[Y | X] carries the same covariance
    // with dW at a fraction of the variance
    for (long p = 0; p < M; ++p) {
      centred(p) = (path(p) - value(e.X(k, first + p), obstacle_at(p), 0)) * e.dW(k, first + p) / dt;
    }
    const PolynomialRegression<double> slope(xs, centred, degree, threads);
    for_each_block(block_count(M), threads, [&](int b) {
      const long lo = static_cast<long>(b) * kPathBlock;
      const long hi = std::min(M, lo + kPathBlock);
      for (long p = lo; p < hi; ++p) {
        const double x = e.X(k, first + p);
        const double obstacle = obstacle_at(p);
        const double c = value(x, obstacle, 0);
        const double z = slope(x);
        const double f = problem.driver.f(t, x, c, z);
        const double cont = c + dt * f;
        const double realized = path(p) + dt * f;
        double y = cont;
        double next = realized;
        if (cont < obstacle) {
          if (mode.penalized) {
            const double dtn = dt * mode.n;
            y = (cont + dtn * obstacle) / (1.0 + dtn);
            next = (realized + dtn * obstacle) / (1.0 + dtn);
          } else {
            y = obstacle;
            next = obstacle;
          }
        }
        est.Y(k, p) = y;
        est.Z(k, p) = z;
        est.running(k, p) = f;
        // off contact dK = 0; on contact it is read off the backward
        // equation Y_k = Y_{k+1} + f dt + dK - Z dW along the path, whose
        // conditional mean is the push h - c' without the regression error
        // that (h - c')^+ would accumulate step after step
        dK(k, p) = cont < obstacle ? next - realized + z * e.dW(k, first + p) : 0.0;
        path(p) = next;
      }
    });
  }
  for (int k = 0; k < N; ++k) est.K.row(k + 1) = est.K.row(k) + dK.row(k);
  est.y0.value = path.mean();
  est.z0 = est.Z(0, 0);
  return est;
}

double batch_ci(const std::vector<double>& values) {
  const int b = static_cast<int>(values.size());
  if (b < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= b;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= (b - 1);
  return 1.96 * std::sqrt(var / b);
}

template <typename Run>
RbsdeEstimate with_batches(const PathEnsemble& e, const McOptions& options, Run run) {
  if (e.path_count < 1000) throw Error(ErrorCode::ValidationFailure, "regression schemes need M >= 1000");
  const long m = e.path_count;
  RbsdeEstimate est = run(0, m);
  std::vector<double> y0s;
  for (int b = 0; b < options.batches; ++b) {
    const long lo = m * b / options.batches, hi = m * (b + 1) / options.batches;
    y0s.push_back(run(lo, hi - lo).y0.value);
  }
  est.y0.ci = batch_ci(y0s);
  return est;
}

struct Distances {
  double y = 0.0;
  double k = 0.0;
};

Distances sup_mean_distance(const RbsdeEstimate& a, const RbsdeEstimate& b) {
  Distances d;
  const double m = static_cast<double>(a.Y.cols());
  for (Eigen::Index k = 0; k < a.Y.rows(); ++k) {
    d.y = std::max(d.y, (a.Y.row(k) - b.Y.row(k)).cwiseAbs().sum() / m);
    d.k = std::max(d.k, (a.K.row(k) - b.K.row(k)).cwiseAbs().sum() / m);
  }
  return d;
}

}  // namespace

RbsdeEstimate rbsde_penalized_mc(const ObstacleProblem& problem, const PathEnsemble& ensemble,
                                 double n_penalty, const McOptions& options) {
  if (!(n_penalty >= 1.0)) throw Error(ErrorCode::ValidationFailure, "n_penalty must be >= 1");
  return with_batches(ensemble, options, [&](long first, long count) {
    return lsmc(problem, ensemble, first, count, {true, n_penalty}, options.degree,
                options.threads);
  });
}

RbsdeEstimate rbsde_reflected_mc(const ObstacleProblem& problem, const PathEnsemble& ensemble,
                                 const McOptions& options) {
  return with_batches(ensemble, options, [&](long first, long count) {
    return lsmc(problem, ensemble, first, count, {false, 0.0}, options.degree, options.threads);
  });
}

std::vector<PenaltyDistance> penalization_convergence_mc(const ObstacleProblem& problem,
                                                         const PathEnsemble& ensemble,
                                                         const std::vector<double>& schedule,
                                                         const McOptions& options) {
  if (ensemble.path_count < 1000) throw Error(ErrorCode::ValidationFailure, "regression schemes need M >= 1000");
  const long m = ensemble.path_count;
  auto run = [&](long first, long count, LsmcMode mode) {
    RbsdeEstimate est = lsmc(problem, ensemble, first, count, mode, options.degree, options.threads);
    est.Z.resize(0, 0);  // only Y and K are compared
    est.running.resize(0, 0);
    return est;
  };
  const RbsdeEstimate reflected = run(0, m, {false, 0.0});
  std::vector<PenaltyDistance> table;
  for (double n : schedule) {
    PenaltyDistance row;
    row.n = n;
    const Distances d = sup_mean_distance(run(0, m, {true, n}), reflected);
    row.y_distance.value = d.y;
    row.k_distance.value = d.k;
    std::vector<double> ys, ks;
    for (int b = 0; b < options.batches; ++b) {
      const long lo = m * b / options.batches, hi = m * (b + 1) / options.batches;
      const Distances db = sup_mean_distance(run(lo, hi - lo, {true, n}), run(lo, hi - lo, {false, 0.0}));
      ys.push_back(db.y);
      ks.push_back(db.k);
    }
    row.y_distance.ci = batch_ci(ys);
    row.k_distance.ci = batch_ci(ks);
    table.push_back(row);
  }
  return table;
}

}  // namespace obstacle
