#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "obstacle/scenario.hpp"
#include "obstacle/stochastic.hpp"

namespace obstacle {

/// One measured quantity with its budget split into a bias part and a
/// statistical part. Passes iff discrepancy <= bias_budget + stat_budget.
struct CheckItem {
  std::string label;
  double discrepancy = 0.0;
  double bias_budget = 0.0;
  double stat_budget = 0.0;
  bool pass = true;

  double budget() const { return bias_budget + stat_budget; }
};

CheckItem make_item(std::string label, double discrepancy, double bias_budget,
                    double stat_budget = 0.0);

struct CheckReport {
  std::string name;
  std::vector<CheckItem> items;
  std::string provenance;

  bool pass() const;
  /// Item with the largest discrepancy / budget.
  const CheckItem& worst() const;
};

/// Space-time test function for the measure checks.
struct TestFunction {
  std::string name;
  std::function<double(double t, double x)> xi;
};

/// 1, cos x and a bump in time vanishing at 0 and T.
std::vector<TestFunction> default_test_functions(double horizon);

enum class MeasureSource { Chain, ReflectedMc };

CheckReport check_hypotheses(const ObstacleProblem& problem, int probe_count, std::uint64_t seed);

CheckReport check_skorokhod(const ObstacleSolution& sol, const Field& h, double tol);

CheckReport check_minimality(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                             const std::vector<double>& schedule, const SolverOptions& options,
                             double agreement_tol);

struct RepresentationInputs {
  long paths = 100000;
  double dt_path = 0.0;
  std::uint64_t seed = 1;
  int degree = 3;
  int threads = 1;
  double c_bias = 0.0;
  double chain_tol = 1e-3;
};

/// Grid u against reflected-mc and chain-dp Y0 at each probe (s, x).
CheckReport check_representation_u(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                                   const ObstacleSolution& sol, const RbsdeEstimate& chain,
                                   const std::vector<std::pair<double, double>>& probes,
                                   const RepresentationInputs& inputs);

/// sigma D u along paths against the regression Z, in time-integrated root mean square.
CheckReport check_representation_z(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                                   const ObstacleSolution& sol, const PathEnsemble& ensemble,
                                   const RbsdeEstimate& reflected, double c_bias);

/// E int xi dK against sum over cells of xi p r dx dt from the start (s, x).
CheckReport check_measure_identity(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                                   const ObstacleSolution& sol, const RbsdeEstimate& chain,
                                   double s, double x, const std::vector<TestFunction>& xis,
                                   double tol, MeasureSource source,
                                   const PathEnsemble* ensemble = nullptr,
                                   const RbsdeEstimate* reflected = nullptr);

/// mu([t1, t2] x F) against sum_x E_{t1,x} int 1_F(X) dK dx from chain-dp.
CheckReport check_interval_measure(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                                   const ObstacleSolution& sol, const RbsdeEstimate& chain,
                                   double t1, double t2, double f_lo, double f_hi, double tol);

/// K~ = int r(theta, X) d theta along paths: backward-equation residual of
/// (u, sigma D u, K~) and the mean of K~_T against the reflected-mc K_T.
CheckReport check_ac_measure(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                             const ObstacleSolution& sol, const PathEnsemble& ensemble,
                             const RbsdeEstimate& reflected, double c_bias_k,
                             double c_bias_residual);

/// Weighted transfer ratios R(phi) over probe functions, their stability
/// under refinement, R(1) = 1 and the pointwise kernel bound shape.
CheckReport check_weighted_bounds(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                                  double refinement_tol, double mass_tol);

const std::vector<std::string>& all_check_names();

/// Runs the named checks on a scenario at its reference resolution.
std::vector<CheckReport> run_checks(const Scenario& scenario, const std::vector<std::string>& names,
                                    int threads);

/// Bias constants from a refinement pre-study over nx = nt in `levels`,
/// with the Monte Carlo seed shifted by one. Each constant is the largest
/// discrepancy / (dt + dx^2) seen, times `safety`.
Calibration calibrate(const Scenario& scenario, const std::vector<int>& levels, int threads,
                      double safety = 1.5);

void write_report_csv(std::ostream& os, const std::vector<CheckReport>& reports);
void write_report_summary(std::ostream& os, const std::vector<CheckReport>& reports);

}  // namespace obstacle
