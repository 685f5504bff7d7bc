#pragma once

#include <Eigen/Core>
#include <iosfwd>

#include "obstacle/problem.hpp"
#include "obstacle/tridiagonal.hpp"

namespace obstacle {

/// Space-time field: row k is the time slice t_k, column i the node x_i
/// (boundary nodes included).
using Field = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Uniform grid on [0, T] x [x_lo, x_hi] with nx interior nodes.
struct SpaceTimeGrid {
  int nx = 0;
  int nt = 0;
  double dx = 0.0;
  double dt = 0.0;
  Vector x_nodes;  // nx + 2 entries
  Vector t_nodes;  // nt + 1 entries

  static SpaceTimeGrid make(const ObstacleProblem& problem, int nx, int nt);

  int nodes() const { return nx + 2; }
  double x(int i) const { return x_nodes(i); }
  double t(int k) const { return t_nodes(k); }
  double x_lo() const { return x_nodes(0); }
  double x_hi() const { return x_nodes(nx + 1); }
  double horizon() const { return t_nodes(nt); }

  Field zeros() const { return Field::Zero(nt + 1, nx + 2); }
  /// Evaluates `fn(t_k, x_i)` on every node.
  Field sample(const SpaceTimeFn& fn) const;
};

/// Flux-form discretization of A_t on one time slice. `rows` acts on the
/// interior unknowns; `left`/`right` couple rows 0 and nx-1 to the boundary
/// nodes. In reflecting mode the outer fluxes vanish and both are zero.
struct DiscreteOperator {
  Tridiagonal<double> rows;
  double left = 0.0;
  double right = 0.0;
  Vector half_a;  // a at the nx + 1 midpoints
  double inv_2dx2 = 0.0;

  /// Interior values of A u for a full-length vector u.
  Vector apply(const Vector& u) const;
  /// Full-length A u with zero boundary rows.
  Vector apply_full(const Vector& u) const;
};

DiscreteOperator assemble_operator(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                                   int t_index);

enum class KernelScheme { Explicit, Implicit };

/// One-step law of the grid Markov chain on all nx + 2 nodes. Boundary nodes
/// absorb. Implicit: P = (I - dt A)^-1, explicit: P = I + dt A.
class TransitionKernel {
 public:
  TransitionKernel(DiscreteOperator op, double dt, KernelScheme scheme, double Lambda);

  KernelScheme scheme() const { return scheme_; }
  const DiscreteOperator& op() const { return op_; }
  /// Interior block of I - dt A.
  const Tridiagonal<double>& implicit_matrix() const { return m_; }
  double dt() const { return dt_; }

  /// (P v), the conditional expectation of v(X_{k+1}) given X_k.
  Vector expect(const Vector& v) const;
  /// P^T p, the law of X_{k+1} when X_k has law p.
  Vector propagate(const Vector& p) const;
  Eigen::MatrixXd dense() const;

 private:
  DiscreteOperator op_;
  double dt_;
  KernelScheme scheme_;
  Tridiagonal<double> m_;
};

TransitionKernel transition_kernel(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                                   int t_index, KernelScheme scheme = KernelScheme::Implicit);

/// Discrete fundamental solution started from a unit mass at (s_index,
/// x_index). Row k holds the probability mass per node at t_k (zero for
/// k < s_index); divide by dx for a density.
struct DensityTable {
  int s_index = 0;
  int x_index = 0;
  Field p;
  Vector mass;  // interior mass per slice
  double clamped = 0.0;  // total magnitude of clamped negative round-off

  double min_mass() const;
};

DensityTable solve_density(const ObstacleProblem& problem, const SpaceTimeGrid& grid, int s_index,
                           int x_index, KernelScheme scheme = KernelScheme::Implicit);

/// Writes (t, y, p) rows for slices k >= s_index with p the density (mass / dx).
void write_density_csv(std::ostream& os, const DensityTable& table, const SpaceTimeGrid& grid);

struct EnvelopeOptions {
  double tail_mass = 1e-8;     // nodes with less mass are trimmed
  double min_tau_fraction = 0.25;  // slices with t - s below this fraction of T - s are trimmed
};

/// Smallest constants with
///   c^-1 (2 pi tau)^-1/2 exp(-c r^2 / 2 tau) <= p <= C (2 pi tau)^-1/2 exp(-r^2 / 2 C tau)
/// on the trimmed region, with r the distance from the start node.
struct EnvelopeFit {
  double c_low = 0.0;
  double C_high = 0.0;
  int points = 0;
  bool passed() const;
};

EnvelopeFit aronson_envelope_check(const DensityTable& density, const SpaceTimeGrid& grid,
                                   const EnvelopeOptions& options = {});

/// L1 distance between the density at slice k and a Gaussian of the given
/// mean and variance, in probability mass.
double gaussian_l1_distance(const DensityTable& density, const SpaceTimeGrid& grid, int k,
                            double mean, double variance);

/// Linear interpolation of row k of a field at x (clamped to the truncation).
double interpolate(const Field& field, const SpaceTimeGrid& grid, int k, double x);
/// Left-constant time index of t.
int time_index(const SpaceTimeGrid& grid, double t);
/// Index of the node nearest to x.
int nearest_node(const SpaceTimeGrid& grid, double x);

/// sigma * D v for a full-length slice; central differences inside, one-sided
/// at the two boundary nodes.
Vector scaled_gradient(const ObstacleProblem& problem, const SpaceTimeGrid& grid, int k,
                       const Vector& v);

}  // namespace obstacle
