#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "obstacle/grid.hpp"
#include "obstacle/solver.hpp"

namespace obstacle {

/// Simulated paths of dX = a_x / 2 dt + sigma dW started at (s, x).
/// X has one row per time point and one column per path.
struct PathEnsemble {
  double s_start = 0.0;
  double x_start = 0.0;
  double dt_path = 0.0;
  int steps = 0;
  long path_count = 0;
  std::uint64_t seed = 0;
  Field X;   // (steps + 1) x M
  Field dW;  // steps x M

  double t(int j) const { return s_start + j * dt_path; }
  /// Columns [first, first + count) as a separate ensemble.
  PathEnsemble slice(long first, long count) const;
};

/// Random stream identifiers; each purpose gets its own stream.
inline constexpr std::uint32_t kPathStream = 1;

/// Number of Euler steps covering [s, T] with step at most dt_path.
int path_steps(double span, double dt_path);

PathEnsemble simulate_paths(const ObstacleProblem& problem, double s, double x, double dt_path,
                            long path_count, std::uint64_t seed, int threads = 1);

struct Estimate {
  double value = 0.0;
  double ci = 0.0;  // half-width, 1.96 standard errors
};

struct MomentRatio {
  Estimate ratio;
  double sup_moment = 0.0;
  double terminal_moment = 0.0;
};

/// E sup_t |X_t|^p / E |X_T|^p over an ensemble (10 batch means for the CI).
MomentRatio moment_ratio_probe(const PathEnsemble& ensemble, double p_exponent);

/// Same probe without storing paths; memory is independent of path_count.
MomentRatio moment_ratio_stream(const ObstacleProblem& problem, double s, double x,
                                double dt_path, long path_count, std::uint64_t seed,
                                double p_exponent, int threads = 1);

/// E int_s^T |g(t, X_t)|^2 dt by the trapezoidal rule on each path.
Estimate estimate_g_integral(const PathEnsemble& ensemble, const SpaceTimeFn& g);

enum class Scheme { ChainDp, PenalizedMc, ReflectedMc };
std::string to_string(Scheme scheme);

/// Estimate of the reflected BSDE triple. For chain-dp the fields live on the
/// grid (rows = time slices, cols = nodes, K holds increments per node); for
/// the Monte Carlo schemes rows are path times and columns are paths, and K is
/// cumulative.
struct RbsdeEstimate {
  Scheme scheme = Scheme::ChainDp;
  Estimate y0;
  double z0 = 0.0;
  Field Y;
  Field Z;
  Field K;
  Field running;  // driver values used in each step
  double n_penalty = 0.0;
  int degree = 0;
};

/// Exact dynamic programming on the grid Markov chain. Y0 is read at
/// (s_index, x_index).
RbsdeEstimate rbsde_chain_dp(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                             int s_index, int x_index, const SolverOptions& options = {});

struct McOptions {
  int degree = 3;
  int batches = 10;  // for the confidence interval
  int threads = 1;
};

RbsdeEstimate rbsde_penalized_mc(const ObstacleProblem& problem, const PathEnsemble& ensemble,
                                 double n_penalty, const McOptions& options = {});
RbsdeEstimate rbsde_reflected_mc(const ObstacleProblem& problem, const PathEnsemble& ensemble,
                                 const McOptions& options = {});

struct PenaltyDistance {
  double n = 0.0;
  Estimate y_distance;  // sup_t mean |Y^n - Y|
  Estimate k_distance;  // sup_t mean |K^n - K|
};

std::vector<PenaltyDistance> penalization_convergence_mc(const ObstacleProblem& problem,
                                                         const PathEnsemble& ensemble,
                                                         const std::vector<double>& schedule,
                                                         const McOptions& options = {});

/// Snell envelope on the grid chain with running reward `running` (the driver
/// evaluated at the chain-dp solution). If null the driver must not depend on
/// (y, z) and is evaluated directly.
Field snell_envelope(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                     const Field* running = nullptr);

struct StoppingValue {
  Estimate rule_value;   // stopping at the first contact time along paths
  double snell_value = 0.0;
  double gap = 0.0;
  double stopped_early = 0.0;  // fraction of paths stopped before T
};

/// Compares the value of the first-contact stopping rule (using the grid
/// solution `sol`) with the Snell envelope of the chain at (s, x).
StoppingValue optimal_stopping_value(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                                     const ObstacleSolution& sol, const PathEnsemble& ensemble,
                                     const Field* running = nullptr);

}  // namespace obstacle
