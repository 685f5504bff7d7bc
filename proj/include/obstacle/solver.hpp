#pragma once

#include <string>
#include <vector>

#include "obstacle/grid.hpp"

namespace obstacle {

struct SolverOptions {
  double contact_tol_rel = 1e-9;  // contact if u - h <= contact_tol_rel (1 + |h|_inf)
  double lcp_tol = 1e-10;
  double inner_tol = 1e-11;
  double mono_tol = 1e-8;
  double omega = 1.5;
  int max_inner = 100000;
  int max_sweeps = 200000;
  int stall_window = 2000;
  double stability_C = 3.0;
  int max_outer = 50;
  double outer_tol = 1e-9;
};

using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Output of the penalized scheme for one level n.
struct PenalizedSolution {
  double n_penalty = 0.0;
  Field u;
  Field r;  // n (u - h)^-
  Field f;  // driver values at the converged iterate
  std::vector<int> inner_iterations;  // indexed by time step
};

struct SolveDiagnostics {
  double max_residual = 0.0;
  long total_iterations = 0;
  std::vector<int> iterations;  // per time step
};

/// Obstacle solution with the reflection measure as a cell density:
/// mu(cell) = r dx dt.
struct ObstacleSolution {
  Field u;
  Field r;
  Field f;  // driver values used in each step
  Mask contact;
  std::string method;  // "psor" or "penalized-limit"
  double contact_tol = 0.0;
  SolveDiagnostics diagnostics;
};

struct LcpOptions {
  double omega = 1.5;
  double tol = 1e-10;
  int max_sweeps = 200000;
  int stall_window = 2000;
};

struct LcpResult {
  int sweeps = 0;
  double residual = 0.0;
};

/// max_i |min(x_i - lower_i, (M x - b)_i)|.
double lcp_residual(const Tridiagonal<double>& M, const Vector& b, const Vector& lower,
                    const Vector& x);

/// Projected SOR for min(x - lower, M x - b) = 0. `x` holds the start value on
/// entry and the solution on exit. Throws LcpStall when the residual stops
/// decreasing for `stall_window` sweeps.
LcpResult solve_lcp_psor(const Tridiagonal<double>& M, const Vector& b, const Vector& lower,
                         Vector& x, const LcpOptions& options);

/// Obstacle values on every node; the terminal row is not special.
Field obstacle_field(const ObstacleProblem& problem, const SpaceTimeGrid& grid);
double contact_tolerance(const Field& h, double rel);

/// Driver f(t_k, x, v, sigma D v) on one slice.
Vector driver_slice(const ObstacleProblem& problem, const SpaceTimeGrid& grid, int k,
                    const Vector& v);
/// Driver evaluated along a whole field.
Field driver_field(const ObstacleProblem& problem, const SpaceTimeGrid& grid, const Field& v);

/// Backward implicit Euler with penalty n (h - u)^+. If `frozen_f` is given,
/// the driver is replaced by that field.
PenalizedSolution solve_penalized(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                                  double n_penalty, const SolverOptions& options = {},
                                  const Field* frozen_f = nullptr);

/// Backward implicit Euler with a complementarity problem per step.
ObstacleSolution solve_psor(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                            const SolverOptions& options = {}, const Field* frozen_f = nullptr);

/// Wraps a penalized level as an obstacle solution.
ObstacleSolution as_obstacle_solution(const PenalizedSolution& pen, const Field& h,
                                      double contact_tol);

struct PenalizationLevel {
  double n = 0.0;
  double sup_increment = 0.0;   // |u_n - u_prev|_inf, 0 on the first level
  double norm_increment = 0.0;  // discrete energy norm of u_n - u_prev
  double distance_to_psor = 0.0;
  double skorokhod = 0.0;       // normalized sum (u - h) r
};

struct PenalizationStudy {
  std::vector<PenalizationLevel> levels;
  std::vector<PenalizedSolution> solutions;
  ObstacleSolution limit;
  ObstacleSolution psor;
  double worst_decrease = 0.0;  // largest u_prev - u_n over all nodes and levels
};

/// Runs solve_penalized along an increasing schedule and checks that the
/// levels increase nodewise. Throws MonotonicityViolation with the witness.
PenalizationStudy penalization_study(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                                     const std::vector<double>& schedule,
                                     const SolverOptions& options = {});

std::vector<double> power_schedule(int first_exponent, int last_exponent);

enum class InnerMethod { Penalized, Psor };

struct PicardTrace {
  double gamma = 0.0;
  std::vector<double> distances;  // between successive iterates
  std::vector<double> ratios;
  int iterations = 0;
  bool converged = false;
};

struct PicardResult {
  ObstacleSolution solution;
  PicardTrace trace;
};

double picard_gamma(double L, double lambda, double Lambda);

/// sqrt(sup_k e^{gamma t_k} |w_k rho|^2 + sum_k e^{gamma t_k} |D w_k rho|^2 dt).
double weighted_energy_norm(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                            const Field& w, double gamma);

PicardResult picard_outer(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                          InnerMethod inner, const SolverOptions& options = {},
                          double n_penalty = 1024.0);

/// Smooth cutoff equal to 1 on the middle of the truncation and vanishing on
/// the outer `margin` fraction at each end.
Vector default_cutoff(const SpaceTimeGrid& grid, double margin = 0.1);

/// Per-time residual of the discrete energy identity for the cutoff xi.
Vector energy_identity_residual(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                                const ObstacleSolution& sol, const Vector& xi);

struct EnergyRate {
  std::vector<int> nts;
  std::vector<double> residuals;  // sup over time of |R|
  double rate = 0.0;              // least-squares slope of log residual in log dt
};

/// Energy identity residual of the PSOR solution over a time refinement at
/// fixed nx, with the default cutoff.
EnergyRate energy_rate_study(const ObstacleProblem& problem, int nx, const std::vector<int>& nts,
                             const SolverOptions& options = {});

struct AprioriReport {
  double left = 0.0;
  double right = 0.0;
  double ratio = 0.0;
};

AprioriReport apriori_norm_report(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                                  const ObstacleSolution& sol, const Field& dominating_p);

struct StabilityReport {
  double solution_distance = 0.0;
  double obstacle_distance = 0.0;
  double ratio = 0.0;
  bool passed = true;
};

StabilityReport obstacle_stability(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                                   const SpaceTimeFn& h1, const SpaceTimeFn& h2,
                                   const SolverOptions& options = {}, double delta = 0.0);

/// max |u_h - u_{h v u~}| with u~ the unconstrained solution.
double obstacle_replacement_check(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                                  const SolverOptions& options = {});

/// Normalized complementarity sum (u - h) r / sum r; 0 when r vanishes.
double skorokhod_ratio(const ObstacleSolution& sol, const Field& h);

}  // namespace obstacle
