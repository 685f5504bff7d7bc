#include "obstacle/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "obstacle/errors.hpp"

namespace obstacle {

double lcp_residual(const Tridiagonal<double>& M, const Vector& b, const Vector& lower,
                    const Vector& x) {
  const Vector w = M * x - b;
  double res = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    res = std::max(res, std::abs(std::min(x(i) - lower(i), w(i))));
  }
  return res;
}

LcpResult solve_lcp_psor(const Tridiagonal<double>& M, const Vector& b, const Vector& lower,
                         Vector& x, const LcpOptions& options) {
  const Eigen::Index n = x.size();
  LcpResult result;
  x = x.cwiseMax(lower);
  double best = std::numeric_limits<double>::infinity();
  int since_best = 0;
  for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double s = b(i);
      if (i > 0) s -= M.lower(i) * x(i - 1);
      if (i + 1 < n) s -= M.upper(i) * x(i + 1);
      const double gs = s / M.diag(i);
      x(i) = std::max(lower(i), x(i) + options.omega * (gs - x(i)));
    }
    result.sweeps = sweep;
    result.residual = lcp_residual(M, b, lower, x);
    if (result.residual <= options.tol) return result;
    if (result.residual < 0.99 * best) {
      best = result.residual;
      since_best = 0;
    } else if (++since_best >= options.stall_window) {
      std::ostringstream os;
      os << "projected SOR stalled at residual " << result.residual << " after " << sweep
         << " sweeps";
      throw Error(ErrorCode::LcpStall, os.str());
    }
  }
  std::ostringstream os;
  os << "projected SOR reached max_sweeps with residual " << result.residual;
  throw Error(ErrorCode::LcpStall, os.str());
}

Field obstacle_field(const ObstacleProblem& problem, const SpaceTimeGrid& grid) {
  return grid.sample(problem.obstacle.h);
}

double contact_tolerance(const Field& h, double rel) {
  double m = 0.0;
  for (Eigen::Index k = 0; k < h.rows(); ++k)
    for (Eigen::Index i = 0; i < h.cols(); ++i)
      if (std::isfinite(h(k, i))) m = std::max(m, std::abs(h(k, i)));
  return rel * (1.0 + m);
}

namespace {

Vector sigma_slice(const ObstacleProblem& problem, const SpaceTimeGrid& grid, int k) {
  Vector s(grid.nodes());
  for (int i = 0; i < grid.nodes(); ++i) s(i) = problem.coefficients.sigma(grid.t(k), grid.x(i));
  return s;
}

Vector gradient(const SpaceTimeGrid& grid, const Vector& sigma, const Vector& v) {
  const int last = grid.nx + 1;
  Vector z(grid.nodes());
  z(0) = (v(1) - v(0)) / grid.dx;
  z(last) = (v(last) - v(last - 1)) / grid.dx;
  for (int i = 1; i < last; ++i) z(i) = (v(i + 1) - v(i - 1)) / (2.0 * grid.dx);
  return z.cwiseProduct(sigma);
}

Vector driver_with_sigma(const ObstacleProblem& problem, const SpaceTimeGrid& grid, int k,
                         const Vector& sigma, const Vector& v) {
  const Vector z = gradient(grid, sigma, v);
  Vector f(grid.nodes());
  const double t = grid.t(k);
  for (int i = 0; i < grid.nodes(); ++i) f(i) = problem.driver.f(t, grid.x(i), v(i), z(i));
  return f;
}

Vector terminal_slice(const ObstacleProblem& problem, const SpaceTimeGrid& grid) {
  Vector u(grid.nodes());
  for (int i = 0; i < grid.nodes(); ++i) u(i) = problem.obstacle.phi(grid.x(i));
  return u;
}

// Per-step data shared by both schemes.
struct Step {
  TransitionKernel kernel;
  double left_value;
  double right_value;

  Step(const ObstacleProblem& problem, const SpaceTimeGrid& grid, int k)
      : kernel(transition_kernel(problem, grid, k)),
        left_value(problem.boundary_value(grid.t(k), grid.x_lo())),
        right_value(problem.boundary_value(grid.t(k), grid.x_hi())) {}

  // Interior right-hand side u_{k+1} + dt f plus the boundary coupling.
  Vector rhs(const SpaceTimeGrid& grid, const Vector& next, const Vector& f) const {
    const int n = grid.nx;
    const double dt = grid.dt;
    Vector b = next.segment(1, n) + dt * f.segment(1, n);
    b(0) += dt * kernel.op().left * left_value;
    b(n - 1) += dt * kernel.op().right * right_value;
    return b;
  }

  Vector assemble(const SpaceTimeGrid& grid, const Vector& interior) const {
    Vector u(grid.nodes());
    u(0) = left_value;
    u(grid.nx + 1) = right_value;
    u.segment(1, grid.nx) = interior;
    return u;
  }
};

double inner_contraction(const ObstacleProblem& problem, const SpaceTimeGrid& grid, double n) {
  const double dtn = grid.dt * n;
  const double L = problem.driver.lipschitz;
  const double lip = grid.dt * L * (1.0 + std::sqrt(problem.coefficients.Lambda) / grid.dx);
  return std::min((dtn + lip) / (1.0 + dtn), 0.999999);
}

}  // namespace

Vector driver_slice(const ObstacleProblem& problem, const SpaceTimeGrid& grid, int k,
                    const Vector& v) {
  return driver_with_sigma(problem, grid, k, sigma_slice(problem, grid, k), v);
}

Field driver_field(const ObstacleProblem& problem, const SpaceTimeGrid& grid, const Field& v) {
  Field f(v.rows(), v.cols());
  for (int k = 0; k <= grid.nt; ++k) f.row(k) = driver_slice(problem, grid, k, v.row(k).transpose()).transpose();
  return f;
}

PenalizedSolution solve_penalized(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                                  double n_penalty, const SolverOptions& options,
                                  const Field* frozen_f) {
  if (!(n_penalty >= 1.0)) throw Error(ErrorCode::ValidationFailure, "n_penalty must be >= 1");
  const int n = grid.nx;
  const double dt = grid.dt;
  const Field h = obstacle_field(problem, grid);
  PenalizedSolution sol;
  sol.n_penalty = n_penalty;
  sol.u = grid.zeros();
  sol.r = grid.zeros();
  sol.f = grid.zeros();
  sol.inner_iterations.assign(grid.nt, 0);

  Vector next = terminal_slice(problem, grid);
  sol.u.row(grid.nt) = next.transpose();
  if (frozen_f) {
    sol.f.row(grid.nt) = frozen_f->row(grid.nt);
  } else {
    sol.f.row(grid.nt) = driver_slice(problem, grid, grid.nt, next).transpose();
  }

  const bool uses_solution = !frozen_f && problem.driver.depends_on_solution();
  const double q = uses_solution ? inner_contraction(problem, grid, n_penalty)
                                 : grid.dt * n_penalty / (1.0 + grid.dt * n_penalty);
  const double stop = options.inner_tol * (1.0 - q) / q;

  for (int k = grid.nt - 1; k >= 0; --k) {
    const Step step(problem, grid, k);
    const Vector sigma = sigma_slice(problem, grid, k);
    Tridiagonal<double> Mp = step.kernel.implicit_matrix();
    Mp.diag.array() += dt * n_penalty;
    const Vector hk = h.row(k).transpose();
    const Vector h_int = hk.segment(1, n);

    Vector v = step.assemble(grid, next.segment(1, n));
    Vector f = frozen_f ? Vector(frozen_f->row(k).transpose())
                        : driver_with_sigma(problem, grid, k, sigma, v);
    int it = 0;
    for (;;) {
      ++it;
      Vector rhs = step.rhs(grid, next, f);
      rhs += dt * n_penalty * v.segment(1, n).cwiseMax(h_int);
      const Vector w = Mp.solve(rhs);
      const double delta = (w - v.segment(1, n)).cwiseAbs().maxCoeff();
      v.segment(1, n) = w;
      if (uses_solution) f = driver_with_sigma(problem, grid, k, sigma, v);
      if (!std::isfinite(delta)) {
        throw Error(ErrorCode::InnerDivergence, "penalized fixed point produced non-finite values");
      }
      if (delta <= stop) break;
      if (it >= options.max_inner) {
        std::ostringstream os;
        os << "penalized fixed point did not converge at step " << k << " (n=" << n_penalty
           << ", last increment " << delta << ")";
        throw Error(ErrorCode::InnerDivergence, os.str());
      }
    }
    sol.inner_iterations[k] = it;
    sol.u.row(k) = v.transpose();
    sol.f.row(k) = f.transpose();
    for (int i = 1; i <= n; ++i) sol.r(k, i) = n_penalty * std::max(0.0, hk(i) - v(i));
    next = v;
  }
  return sol;
}

ObstacleSolution solve_psor(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                            const SolverOptions& options, const Field* frozen_f) {
  const int n = grid.nx;
  const double dt = grid.dt;
  const Field h = obstacle_field(problem, grid);
  ObstacleSolution sol;
  sol.method = "psor";
  sol.u = grid.zeros();
  sol.r = grid.zeros();
  sol.f = grid.zeros();
  sol.contact_tol = contact_tolerance(h, options.contact_tol_rel);
  sol.diagnostics.iterations.assign(grid.nt, 0);

  LcpOptions lcp;
  lcp.omega = options.omega;
  lcp.tol = options.lcp_tol;
  lcp.max_sweeps = options.max_sweeps;
  lcp.stall_window = options.stall_window;

  Vector next = terminal_slice(problem, grid);
  sol.u.row(grid.nt) = next.transpose();
  sol.f.row(grid.nt) = frozen_f ? Vector(frozen_f->row(grid.nt).transpose())
                                : driver_slice(problem, grid, grid.nt, next);
  const bool uses_solution = !frozen_f && problem.driver.depends_on_solution();

  for (int k = grid.nt - 1; k >= 0; --k) {
    const Step step(problem, grid, k);
    const Vector sigma = sigma_slice(problem, grid, k);
    const Tridiagonal<double>& M = step.kernel.implicit_matrix();
    const Vector lower = h.row(k).transpose().segment(1, n);

    Vector v = step.assemble(grid, next.segment(1, n));
    Vector f = frozen_f ? Vector(frozen_f->row(k).transpose())
                        : driver_with_sigma(problem, grid, k, sigma, v);
    Vector f_used;
    Vector b;
    LcpResult res;
    int sweeps = 0;
    for (int outer = 1;; ++outer) {
      f_used = f;
      b = step.rhs(grid, next, f_used);
      // start from the projected unconstrained step
      Vector x = M.solve(b).cwiseMax(lower);
      res = solve_lcp_psor(M, b, lower, x, lcp);
      sweeps += res.sweeps;
      const double delta = (x - v.segment(1, n)).cwiseAbs().maxCoeff();
      v.segment(1, n) = x;
      if (!uses_solution) break;
      f = driver_with_sigma(problem, grid, k, sigma, v);
      if (delta <= options.inner_tol) break;
      if (outer >= options.max_inner) {
        throw Error(ErrorCode::InnerDivergence, "driver refinement did not converge");
      }
    }
    const Vector w = M * Vector(v.segment(1, n)) - b;
    for (int i = 1; i <= n; ++i) {
      if (v(i) - h(k, i) <= sol.contact_tol) sol.r(k, i) = std::max(0.0, w(i - 1)) / dt;
    }
    sol.diagnostics.iterations[k] = sweeps;
    sol.diagnostics.total_iterations += sweeps;
    sol.diagnostics.max_residual = std::max(sol.diagnostics.max_residual, res.residual);
    sol.u.row(k) = v.transpose();
    sol.f.row(k) = f_used.transpose();
    next = v;
  }
  sol.contact = (sol.u - h).array() <= sol.contact_tol;
  return sol;
}

ObstacleSolution as_obstacle_solution(const PenalizedSolution& pen, const Field& h,
                                      double contact_tol) {
  ObstacleSolution sol;
  sol.method = "penalized-limit";
  sol.u = pen.u;
  sol.r = pen.r;
  sol.f = pen.f;
  sol.contact_tol = contact_tol;
  sol.contact = (pen.u - h).array() <= contact_tol;
  for (int it : pen.inner_iterations) {
    sol.diagnostics.iterations.push_back(it);
    sol.diagnostics.total_iterations += it;
  }
  return sol;
}

std::vector<double> power_schedule(int first_exponent, int last_exponent) {
  std::vector<double> s;
  for (int j = first_exponent; j <= last_exponent; ++j) s.push_back(std::ldexp(1.0, j));
  return s;
}

double skorokhod_ratio(const ObstacleSolution& sol, const Field& h) {
  double num = 0.0;
  double den = 0.0;
  for (Eigen::Index k = 0; k < sol.r.rows(); ++k)
    for (Eigen::Index i = 0; i < sol.r.cols(); ++i) {
      const double r = sol.r(k, i);
      if (r == 0.0) continue;
      num += (sol.u(k, i) - h(k, i)) * r;
      den += r;
    }
  return den > 0.0 ? std::abs(num) / den : 0.0;
}

PenalizationStudy penalization_study(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                                     const std::vector<double>& schedule,
                                     const SolverOptions& options) {
  if (schedule.empty()) throw Error(ErrorCode::ValidationFailure, "empty penalty schedule");
  for (std::size_t j = 1; j < schedule.size(); ++j) {
    if (!(schedule[j] > schedule[j - 1])) {
      throw Error(ErrorCode::ValidationFailure, "penalty schedule must be strictly increasing");
    }
  }
  const Field h = obstacle_field(problem, grid);
  const double tol = contact_tolerance(h, options.contact_tol_rel);
  PenalizationStudy study;
  study.psor = solve_psor(problem, grid, options);
  for (std::size_t j = 0; j < schedule.size(); ++j) {
    PenalizedSolution pen = solve_penalized(problem, grid, schedule[j], options);
    PenalizationLevel level;
    level.n = schedule[j];
    level.distance_to_psor = (pen.u - study.psor.u).cwiseAbs().maxCoeff();
    if (!study.solutions.empty()) {
      const Field diff = pen.u - study.solutions.back().u;
      level.sup_increment = diff.cwiseAbs().maxCoeff();
      level.norm_increment = weighted_energy_norm(problem, grid, diff, 0.0);
      for (Eigen::Index k = 0; k < diff.rows(); ++k)
        for (Eigen::Index i = 0; i < diff.cols(); ++i) {
          const double decrease = -diff(k, i);
          study.worst_decrease = std::max(study.worst_decrease, decrease);
          if (decrease > options.mono_tol) {
            std::ostringstream os;
            os << "u_n decreased by " << decrease << " between n=" << schedule[j - 1]
               << " and n=" << schedule[j] << " at t=" << grid.t(static_cast<int>(k))
               << ", x=" << grid.x(static_cast<int>(i));
            throw Error(ErrorCode::MonotonicityViolation, os.str());
          }
        }
    }
    ObstacleSolution as_obstacle = as_obstacle_solution(pen, h, tol);
    level.skorokhod = skorokhod_ratio(as_obstacle, h);
    const bool inactive = pen.r.cwiseAbs().maxCoeff() == 0.0;
    study.levels.push_back(level);
    study.solutions.push_back(std::move(pen));
    // penalty never active: every later level is identical
    if (j == 0 && inactive) break;
  }
  study.limit = as_obstacle_solution(study.solutions.back(), h, tol);
  return study;
}

double picard_gamma(double L, double lambda, double Lambda) {
  return 1.0 + 4.0 * L * L + 8.0 / lambda * Lambda * Lambda * L * L + Lambda / (2.0 * lambda);
}

double weighted_energy_norm(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                            const Field& w, double gamma) {
  Vector rho2(grid.nodes());
  for (int i = 0; i < grid.nodes(); ++i) rho2(i) = std::pow(problem.weight(grid.x(i)), 2);
  Vector rho2_half(grid.nodes() - 1);
  for (int i = 0; i + 1 < grid.nodes(); ++i) {
    rho2_half(i) = std::pow(problem.weight(0.5 * (grid.x(i) + grid.x(i + 1))), 2);
  }
  double sup_term = 0.0;
  double grad_term = 0.0;
  for (int k = 0; k <= grid.nt; ++k) {
    const double e = std::exp(gamma * grid.t(k));
    double l2 = 0.0;
    for (int i = 0; i < grid.nodes(); ++i) l2 += w(k, i) * w(k, i) * rho2(i);
    sup_term = std::max(sup_term, e * l2 * grid.dx);
    if (k == grid.nt) continue;
    double g2 = 0.0;
    for (int i = 0; i + 1 < grid.nodes(); ++i) {
      const double d = (w(k, i + 1) - w(k, i)) / grid.dx;
      g2 += d * d * rho2_half(i);
    }
    grad_term += e * g2 * grid.dx * grid.dt;
  }
  return std::sqrt(sup_term + grad_term);
}

PicardResult picard_outer(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                          InnerMethod inner, const SolverOptions& options, double n_penalty) {
  PicardResult result;
  PicardTrace& trace = result.trace;
  trace.gamma = picard_gamma(problem.driver.lipschitz, problem.coefficients.lambda,
                             problem.coefficients.Lambda);
  const Field h = obstacle_field(problem, grid);
  const double tol = contact_tolerance(h, options.contact_tol_rel);
  SolverOptions inner_options = options;
  inner_options.lcp_tol = std::min(options.lcp_tol, 1e-13);

  auto phi_map = [&](const Field& v) {
    const Field fv = driver_field(problem, grid, v);
    if (inner == InnerMethod::Psor) return solve_psor(problem, grid, inner_options, &fv);
    return as_obstacle_solution(solve_penalized(problem, grid, n_penalty, inner_options, &fv), h,
                                tol);
  };

  Field v = grid.zeros();
  for (int k = 0; k <= grid.nt; ++k)
    for (int i = 0; i < grid.nodes(); ++i) v(k, i) = problem.obstacle.phi(grid.x(i));

  int above_one = 0;
  for (int it = 1; it <= std::max(1, options.max_outer); ++it) {
    ObstacleSolution next = phi_map(v);
    trace.iterations = it;
    const double d = weighted_energy_norm(problem, grid, next.u - v, trace.gamma);
    trace.distances.push_back(d);
    v = next.u;
    result.solution = std::move(next);
    if (!problem.driver.depends_on_solution()) {
      trace.converged = true;
      break;
    }
    if (trace.distances.size() >= 2) {
      const double prev = trace.distances[trace.distances.size() - 2];
      const double ratio = prev > 0.0 ? d / prev : 0.0;
      trace.ratios.push_back(ratio);
      above_one = ratio > 1.0 ? above_one + 1 : 0;
      if (above_one >= 3) {
        std::ostringstream os;
        os << "Picard ratios exceeded 1 for 3 consecutive iterations (last " << ratio << ")";
        throw Error(ErrorCode::NoContraction, os.str());
      }
    }
    if (d <= options.outer_tol) {
      trace.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace obstacle
