#include <algorithm>
#include <cmath>

#include "obstacle/errors.hpp"
#include "obstacle/stochastic.hpp"

namespace obstacle {

Field snell_envelope(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                     const Field* running) {
  if (!running && problem.driver.depends_on_solution()) {
    throw Error(ErrorCode::ValidationFailure,
                "Snell envelope needs a running reward when the driver depends on (y, z)");
  }
  const Field h = obstacle_field(problem, grid);
  Field V = grid.zeros();
  Vector next(grid.nodes());
  for (int i = 0; i < grid.nodes(); ++i) next(i) = problem.obstacle.phi(grid.x(i));
  V.row(grid.nt) = next.transpose();
  for (int k = grid.nt - 1; k >= 0; --k) {
    const Vector E = transition_kernel(problem, grid, k).expect(next);
    Vector g(grid.nodes());
    if (running) {
      g = running->row(k).transpose();
    } else {
      for (int i = 0; i < grid.nodes(); ++i) g(i) = problem.driver.f(grid.t(k), grid.x(i), 0.0, 0.0);
    }
    const Vector C = E + grid.dt * g;
    for (int i = 0; i < grid.nodes(); ++i) next(i) = std::max(h(k, i), C(i));
    V.row(k) = next.transpose();
  }
  return V;
}

StoppingValue optimal_stopping_value(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                                     const ObstacleSolution& sol, const PathEnsemble& ensemble,
                                     const Field* running) {
  const Field h = obstacle_field(problem, grid);
  const Field gap = sol.u - h;
  Field z = grid.zeros();
  for (int k = 0; k <= grid.nt; ++k) {
    z.row(k) = scaled_gradient(problem, grid, k, sol.u.row(k).transpose()).transpose();
  }

  const long m = ensemble.path_count;
  double sum = 0.0, sum2 = 0.0;
  long early = 0;
  for (long p = 0; p < m; ++p) {
    double value = 0.0;
    for (int j = 0;; ++j) {
      const double t = ensemble.t(j);
      const double x = ensemble.X(j, p);
      if (j == ensemble.steps) {
        value += problem.obstacle.phi(x);
        break;
      }
      const int k = time_index(grid, t);
      if (interpolate(gap, grid, k, x) <= sol.contact_tol) {
        value += problem.obstacle.h(t, x);
        ++early;
        break;
      }
      const double u = interpolate(sol.u, grid, k, x);
      const double zu = interpolate(z, grid, k, x);
      value += ensemble.dt_path * problem.driver.f(t, x, u, zu);
    }
    sum += value;
    sum2 += value * value;
  }
  StoppingValue out;
  out.rule_value.value = sum / m;
  if (m > 1) {
    const double var = std::max(0.0, (sum2 - m * out.rule_value.value * out.rule_value.value) / (m - 1));
    out.rule_value.ci = 1.96 * std::sqrt(var / m);
  }
  out.stopped_early = static_cast<double>(early) / m;

  const Field V = snell_envelope(problem, grid, running);
  out.snell_value = interpolate(V, grid, time_index(grid, ensemble.s_start), ensemble.x_start);
  out.gap = std::abs(out.rule_value.value - out.snell_value);
  return out;
}

}  // namespace obstacle
