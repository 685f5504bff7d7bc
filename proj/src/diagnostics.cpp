#include <algorithm>
#include <cmath>
#include <limits>

#include "obstacle/errors.hpp"
#include "obstacle/solver.hpp"

namespace obstacle {

Vector default_cutoff(const SpaceTimeGrid& grid, double margin) {
  Vector xi(grid.nodes());
  const double width = grid.x_hi() - grid.x_lo();
  constexpr double kHalfPi = 1.5707963267948966;
  for (int i = 0; i < grid.nodes(); ++i) {
    const double s = (grid.x(i) - grid.x_lo()) / width;
    const double d = std::min(s, 1.0 - s);  // distance to the nearer end
    if (d <= margin) {
      xi(i) = 0.0;
    } else if (d >= 2.0 * margin) {
      xi(i) = 1.0;
    } else {
      const double w = std::sin(kHalfPi * (d - margin) / margin);
      xi(i) = w * w;
    }
  }
  xi(0) = 0.0;
  xi(grid.nx + 1) = 0.0;
  return xi;
}

Vector energy_identity_residual(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                                const ObstacleSolution& sol, const Vector& xi) {
  const int nodes = grid.nodes();
  const Vector xi2 = xi.cwiseProduct(xi);
  auto mass = [&](const Vector& v) { return v.cwiseProduct(v).dot(xi2) * grid.dx; };

  Vector residual = Vector::Zero(grid.nt + 1);
  const Vector phi = sol.u.row(grid.nt).transpose();
  const double phi_term = mass(phi);
  double accumulated = 0.0;  // sum over j >= k of dt (G_j - 2 <f_j, u xi^2> - 2 <r_j, u xi^2>)
  residual(grid.nt) = mass(phi) - phi_term;
  for (int k = grid.nt - 1; k >= 0; --k) {
    const Vector u = sol.u.row(k).transpose();
    const Vector w = u.cwiseProduct(xi2);
    const DiscreteOperator op = assemble_operator(problem, grid, k);
    double energy = 0.0;
    for (int m = 0; m + 1 < nodes; ++m) {
      energy += op.half_a(m) * (u(m + 1) - u(m)) * (w(m + 1) - w(m));
    }
    energy /= grid.dx;
    const double drift = sol.f.row(k).dot(w) * grid.dx;
    const double measure = sol.r.row(k).dot(w) * grid.dx;
    accumulated += grid.dt * (energy - 2.0 * drift - 2.0 * measure);
    residual(k) = mass(u) + accumulated - phi_term;
  }
  return residual;
}

AprioriReport apriori_norm_report(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                                  const ObstacleSolution& sol, const Field& dominating_p) {
  const int nodes = grid.nodes();
  Vector rho2(nodes);
  for (int i = 0; i < nodes; ++i) rho2(i) = std::pow(problem.weight(grid.x(i)), 2);
  Vector rho2_half(nodes - 1);
  for (int i = 0; i + 1 < nodes; ++i) {
    rho2_half(i) = std::pow(problem.weight(0.5 * (grid.x(i) + grid.x(i + 1))), 2);
  }
  auto l2 = [&](const Vector& v) { return v.cwiseProduct(v).dot(rho2) * grid.dx; };
  auto grad2 = [&](const Vector& v) {
    double s = 0.0;
    for (int i = 0; i + 1 < nodes; ++i) {
      const double d = (v(i + 1) - v(i)) / grid.dx;
      s += d * d * rho2_half(i);
    }
    return s * grid.dx;
  };

  const Field p_plus = dominating_p.cwiseMax(0.0);
  AprioriReport rep;
  double sup_u = 0.0;
  double grad_u = 0.0;
  double measure = 0.0;
  double sup_p = 0.0;
  double integral = 0.0;
  for (int k = 0; k <= grid.nt; ++k) {
    const Vector u = sol.u.row(k).transpose();
    const Vector p = p_plus.row(k).transpose();
    sup_u = std::max(sup_u, l2(u));
    sup_p = std::max(sup_p, l2(p));
    if (k == grid.nt) continue;
    grad_u += grad2(u) * grid.dt;
    for (int i = 0; i < nodes; ++i) {
      measure += std::abs(u(i)) * rho2(i) * sol.r(k, i) * grid.dx * grid.dt;
    }
    const Vector dp = (p_plus.row(k + 1) - p_plus.row(k)).transpose() / grid.dt;
    Vector g(nodes);
    for (int i = 0; i < nodes; ++i) g(i) = problem.driver.g(grid.t(k), grid.x(i));
    integral += (l2(dp) + grad2(p) + l2(g)) * grid.dt;
  }
  rep.left = sup_u + grad_u + measure;
  rep.right = l2(sol.u.row(grid.nt).transpose()) + sup_p + integral;
  rep.ratio = rep.right > 0.0 ? rep.left / rep.right
                              : (rep.left > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  return rep;
}

StabilityReport obstacle_stability(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                                   const SpaceTimeFn& h1, const SpaceTimeFn& h2,
                                   const SolverOptions& options, double delta) {
  const ObstacleProblem p1 = problem.with_obstacle(h1);
  const ObstacleProblem p2 = problem.with_obstacle(h2);
  const ObstacleSolution s1 = solve_psor(p1, grid, options);
  const ObstacleSolution s2 = solve_psor(p2, grid, options);
  const Field o1 = grid.sample(h1);
  const Field o2 = grid.sample(h2);
  StabilityReport rep;
  for (int k = 0; k <= grid.nt; ++k) {
    for (int i = 0; i < grid.nodes(); ++i) {
      const double dh = std::abs(o1(k, i) - o2(k, i));
      if (std::isfinite(dh)) rep.obstacle_distance = std::max(rep.obstacle_distance, dh);
      if (grid.t(k) <= grid.horizon() - delta + 1e-12) {
        rep.solution_distance = std::max(rep.solution_distance, std::abs(s1.u(k, i) - s2.u(k, i)));
      }
    }
  }
  if (rep.obstacle_distance > 0.0) {
    rep.ratio = rep.solution_distance / rep.obstacle_distance;
  } else {
    rep.ratio = rep.solution_distance > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  rep.passed = rep.ratio <= options.stability_C;
  return rep;
}

double obstacle_replacement_check(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                                  const SolverOptions& options) {
  const ObstacleProblem free = problem.with_obstacle(
      [](double, double) { return -std::numeric_limits<double>::infinity(); });
  const ObstacleSolution unconstrained = solve_psor(free, grid, options);
  const Field free_u = unconstrained.u;
  const SpaceTimeGrid g = grid;
  const SpaceTimeFn h = problem.obstacle.h;
  auto raised = [h, free_u, g](double t, double x) {
    const int k = std::clamp(static_cast<int>(std::lround(t / g.dt)), 0, g.nt);
    return std::max(h(t, x), interpolate(free_u, g, k, x));
  };
  const ObstacleSolution with_h = solve_psor(problem, grid, options);
  const ObstacleSolution with_raised = solve_psor(problem.with_obstacle(raised), grid, options);
  return (with_h.u - with_raised.u).cwiseAbs().maxCoeff();
}


EnergyRate energy_rate_study(const ObstacleProblem& problem, int nx, const std::vector<int>& nts,
                             const SolverOptions& options) {
  if (nts.size() < 2) throw Error(ErrorCode::ValidationFailure, "energy rate needs two resolutions");
  EnergyRate out;
  out.nts = nts;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (int nt : nts) {
    const SpaceTimeGrid grid = SpaceTimeGrid::make(problem, nx, nt);
    const ObstacleSolution sol = solve_psor(problem, grid, options);
    const Vector r = energy_identity_residual(problem, grid, sol, default_cutoff(grid));
    const double sup = r.cwiseAbs().maxCoeff();
    out.residuals.push_back(sup);
    const double lx = std::log(grid.dt), ly = std::log(std::max(sup, 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(nts.size());
  out.rate = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return out;
}

}  // namespace obstacle
