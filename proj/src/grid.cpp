#include "obstacle/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "obstacle/csv.hpp"
#include "obstacle/errors.hpp"

namespace obstacle {

SpaceTimeGrid SpaceTimeGrid::make(const ObstacleProblem& problem, int nx, int nt) {
  if (nx < 1 || nt < 1) throw Error(ErrorCode::ValidationFailure, "grid needs nx >= 1 and nt >= 1");
  const double x_lo = problem.truncation.x_lo;
  const double x_hi = problem.truncation.x_hi;
  SpaceTimeGrid g;
  g.nx = nx;
  g.nt = nt;
  g.dx = (x_hi - x_lo) / (nx + 1);
  g.dt = problem.horizon / nt;
  g.x_nodes.resize(nx + 2);
  for (int i = 0; i <= nx + 1; ++i) g.x_nodes(i) = x_lo + i * g.dx;
  g.x_nodes(nx + 1) = x_hi;
  g.t_nodes.resize(nt + 1);
  for (int k = 0; k <= nt; ++k) g.t_nodes(k) = k * g.dt;
  g.t_nodes(nt) = problem.horizon;
  return g;
}

Field SpaceTimeGrid::sample(const SpaceTimeFn& fn) const {
  Field f(nt + 1, nx + 2);
  for (int k = 0; k <= nt; ++k)
    for (int i = 0; i <= nx + 1; ++i) f(k, i) = fn(t(k), x(i));
  return f;
}

Vector DiscreteOperator::apply(const Vector& u) const {
  const Eigen::Index n = rows.size();
  Vector interior = u.segment(1, n);
  Vector out = rows * interior;
  out(0) += left * u(0);
  out(n - 1) += right * u(n + 1);
  return out;
}

Vector DiscreteOperator::apply_full(const Vector& u) const {
  Vector out = Vector::Zero(u.size());
  out.segment(1, rows.size()) = apply(u);
  return out;
}

DiscreteOperator assemble_operator(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                                   int t_index) {
  if (t_index < 0 || t_index > grid.nt) throw Error(ErrorCode::ValidationFailure, "t_index out of range");
  const int nx = grid.nx;
  const double t = grid.t(t_index);
  DiscreteOperator op;
  op.inv_2dx2 = 1.0 / (2.0 * grid.dx * grid.dx);
  op.half_a.resize(nx + 1);
  for (int j = 0; j <= nx; ++j) {
    op.half_a(j) = problem.coefficients.a(t, 0.5 * (grid.x(j) + grid.x(j + 1)));
  }
  if (problem.truncation.mode == BoundaryMode::Reflecting) {
    op.half_a(0) = 0.0;
    op.half_a(nx) = 0.0;
  }
  op.rows = Tridiagonal<double>(nx);
  for (int i = 0; i < nx; ++i) {
    const double am = op.half_a(i) * op.inv_2dx2;
    const double ap = op.half_a(i + 1) * op.inv_2dx2;
    op.rows.lower(i) = am;
    op.rows.upper(i) = ap;
    op.rows.diag(i) = -(am + ap);
  }
  op.left = op.rows.lower(0);
  op.right = op.rows.upper(nx - 1);
  op.rows.lower(0) = 0.0;
  op.rows.upper(nx - 1) = 0.0;
  return op;
}

TransitionKernel::TransitionKernel(DiscreteOperator op, double dt, KernelScheme scheme,
                                   double Lambda)
    : op_(std::move(op)), dt_(dt), scheme_(scheme) {
  const double dx2 = 0.5 / op_.inv_2dx2;
  if (scheme_ == KernelScheme::Explicit) {
    double a_max = Lambda;
    for (Eigen::Index j = 0; j < op_.half_a.size(); ++j) a_max = std::max(a_max, op_.half_a(j));
    if (dt_ > dx2 / a_max * (1.0 + 1e-12)) {
      throw Error(ErrorCode::CflViolation, "explicit kernel requires dt <= dx^2 / Lambda");
    }
  }
  const Eigen::Index n = op_.rows.size();
  m_ = Tridiagonal<double>(n);
  m_.lower = -dt_ * op_.rows.lower;
  m_.upper = -dt_ * op_.rows.upper;
  m_.diag = Vector::Ones(n) - dt_ * op_.rows.diag;
}

Vector TransitionKernel::expect(const Vector& v) const {
  const Eigen::Index n = op_.rows.size();
  Vector out = v;
  if (scheme_ == KernelScheme::Explicit) {
    out.segment(1, n) += dt_ * op_.apply(v);
    return out;
  }
  Vector rhs = v.segment(1, n);
  rhs(0) += dt_ * op_.left * v(0);
  rhs(n - 1) += dt_ * op_.right * v(n + 1);
  out.segment(1, n) = m_.solve(rhs);
  return out;
}

Vector TransitionKernel::propagate(const Vector& p) const {
  const Eigen::Index n = op_.rows.size();
  Vector q = p;
  if (scheme_ == KernelScheme::Explicit) {
    // (I + dt A_full)^T p
    Vector interior = p.segment(1, n);
    q.segment(1, n) = interior + dt_ * (op_.rows.transposed() * interior);
    q(0) += dt_ * op_.left * p(1);
    q(n + 1) += dt_ * op_.right * p(n);
    return q;
  }
  q.segment(1, n) = m_.solve_transposed(p.segment(1, n));
  q(0) = p(0) + dt_ * op_.left * q(1);
  q(n + 1) = p(n + 1) + dt_ * op_.right * q(n);
  return q;
}

Eigen::MatrixXd TransitionKernel::dense() const {
  const Eigen::Index size = op_.rows.size() + 2;
  Eigen::MatrixXd P(size, size);
  for (Eigen::Index j = 0; j < size; ++j) P.col(j) = expect(Vector::Unit(size, j));
  return P;
}

TransitionKernel transition_kernel(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                                   int t_index, KernelScheme scheme) {
  return TransitionKernel(assemble_operator(problem, grid, t_index), grid.dt, scheme,
                          problem.coefficients.Lambda);
}

double DensityTable::min_mass() const { return mass.size() ? mass.minCoeff() : 0.0; }

DensityTable solve_density(const ObstacleProblem& problem, const SpaceTimeGrid& grid, int s_index,
                           int x_index, KernelScheme scheme) {
  if (s_index < 0 || s_index >= grid.nt) throw Error(ErrorCode::ValidationFailure, "s_index must be < nt");
  if (x_index < 0 || x_index > grid.nx + 1) throw Error(ErrorCode::ValidationFailure, "x_index out of range");
  DensityTable table;
  table.s_index = s_index;
  table.x_index = x_index;
  table.p = grid.zeros();
  table.mass = Vector::Zero(grid.nt + 1);
  Vector p = Vector::Unit(grid.nodes(), x_index);
  table.p.row(s_index) = p.transpose();
  table.mass(s_index) = p.segment(1, grid.nx).sum();
  for (int k = s_index; k < grid.nt; ++k) {
    // the step from t_k to t_{k+1} uses the operator frozen at t_k
    p = transition_kernel(problem, grid, k, scheme).propagate(p);
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      if (p(i) < 0.0) {
        table.clamped += -p(i);
        p(i) = 0.0;
      }
    }
    table.p.row(k + 1) = p.transpose();
    table.mass(k + 1) = p.segment(1, grid.nx).sum();
  }
  for (int k = 0; k < s_index; ++k) table.mass(k) = 1.0;
  return table;
}

void write_density_csv(std::ostream& os, const DensityTable& table, const SpaceTimeGrid& grid) {
  CsvWriter csv(os);
  csv.header({"t", "y", "p"});
  for (int k = table.s_index; k <= grid.nt; ++k)
    for (int i = 0; i <= grid.nx + 1; ++i) csv.row({grid.t(k), grid.x(i), table.p(k, i) / grid.dx});
}

bool EnvelopeFit::passed() const { return std::isfinite(c_low) && std::isfinite(C_high) && points > 0; }

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double upper_envelope(double C, double tau, double r2) {
  return C / std::sqrt(kTwoPi * tau) * std::exp(-r2 / (2.0 * C * tau));
}

double lower_envelope(double c, double tau, double r2) {
  return 1.0 / (c * std::sqrt(kTwoPi * tau)) * std::exp(-c * r2 / (2.0 * tau));
}

// Smallest C with upper_envelope(C) >= p (increasing in C).
double fit_upper(double p, double tau, double r2) {
  double lo = 1e-6, hi = 1.0;
  while (upper_envelope(hi, tau, r2) < p) {
    hi *= 2.0;
    if (hi > 1e12) return std::numeric_limits<double>::infinity();
  }
  if (upper_envelope(lo, tau, r2) >= p) return lo;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (upper_envelope(mid, tau, r2) >= p ? hi : lo) = mid;
  }
  return hi;
}

// Smallest c with lower_envelope(c) <= p (decreasing in c).
double fit_lower(double p, double tau, double r2) {
  double lo = 1e-6, hi = 1.0;
  while (lower_envelope(hi, tau, r2) > p) {
    hi *= 2.0;
    if (hi > 1e12) return std::numeric_limits<double>::infinity();
  }
  if (lower_envelope(lo, tau, r2) <= p) return lo;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (lower_envelope(mid, tau, r2) <= p ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

EnvelopeFit aronson_envelope_check(const DensityTable& density, const SpaceTimeGrid& grid,
                                   const EnvelopeOptions& options) {
  EnvelopeFit fit;
  const double s = grid.t(density.s_index);
  const double x0 = grid.x(density.x_index);
  const double span = grid.horizon() - s;
  for (int k = density.s_index + 1; k <= grid.nt; ++k) {
    const double tau = grid.t(k) - s;
    if (tau < options.min_tau_fraction * span) continue;
    for (int i = 1; i <= grid.nx; ++i) {
      const double mass = density.p(k, i);
      if (!(mass >= options.tail_mass)) continue;
      const double p = mass / grid.dx;
      const double r2 = (grid.x(i) - x0) * (grid.x(i) - x0);
      fit.C_high = std::max(fit.C_high, fit_upper(p, tau, r2));
      fit.c_low = std::max(fit.c_low, fit_lower(p, tau, r2));
      ++fit.points;
    }
  }
  if (fit.points == 0) {
    throw Error(ErrorCode::GridTooCoarse, "trimmed envelope region is empty");
  }
  return fit;
}

double gaussian_l1_distance(const DensityTable& density, const SpaceTimeGrid& grid, int k,
                            double mean, double variance) {
  // cell masses of the exact law on [x_i - dx/2, x_i + dx/2]
  const double sd = std::sqrt(variance);
  auto cdf = [&](double x) { return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0))); };
  double l1 = 0.0;
  double covered = 0.0;
  for (int i = 0; i <= grid.nx + 1; ++i) {
    const double lo = i == 0 ? -std::numeric_limits<double>::infinity() : grid.x(i) - 0.5 * grid.dx;
    const double hi = i == grid.nx + 1 ? std::numeric_limits<double>::infinity()
                                       : grid.x(i) + 0.5 * grid.dx;
    const double exact = (std::isinf(hi) ? 1.0 : cdf(hi)) - (std::isinf(lo) ? 0.0 : cdf(lo));
    covered += exact;
    l1 += std::abs(density.p(k, i) - exact);
  }
  return l1 + std::abs(1.0 - covered);
}

int time_index(const SpaceTimeGrid& grid, double t) {
  const int k = static_cast<int>(std::floor(t / grid.dt + 1e-9));
  return std::clamp(k, 0, grid.nt);
}

int nearest_node(const SpaceTimeGrid& grid, double x) {
  const int i = static_cast<int>(std::lround((x - grid.x_lo()) / grid.dx));
  return std::clamp(i, 0, grid.nx + 1);
}

double interpolate(const Field& field, const SpaceTimeGrid& grid, int k, double x) {
  if (x <= grid.x_lo()) return field(k, 0);
  if (x >= grid.x_hi()) return field(k, grid.nx + 1);
  const double pos = (x - grid.x_lo()) / grid.dx;
  const int i = std::min(static_cast<int>(pos), grid.nx);
  const double w = pos - i;
  return (1.0 - w) * field(k, i) + w * field(k, i + 1);
}

Vector scaled_gradient(const ObstacleProblem& problem, const SpaceTimeGrid& grid, int k,
                       const Vector& v) {
  const int last = grid.nx + 1;
  const double t = grid.t(k);
  Vector z(grid.nodes());
  z(0) = (v(1) - v(0)) / grid.dx;
  z(last) = (v(last) - v(last - 1)) / grid.dx;
  for (int i = 1; i < last; ++i) z(i) = (v(i + 1) - v(i - 1)) / (2.0 * grid.dx);
  for (int i = 0; i <= last; ++i) z(i) *= problem.coefficients.sigma(t, grid.x(i));
  return z;
}

}  // namespace obstacle
