#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace obstacle {

/// Evaluator of a space-time field (t, x).
using SpaceTimeFn = std::function<double(double t, double x)>;
/// Evaluator of a purely spatial field x.
using SpaceFn = std::function<double(double x)>;
/// Driver evaluator (t, x, y, z), where z is the sigma-scaled gradient.
using DriverFn = std::function<double(double t, double x, double y, double z)>;

enum class BoundaryMode { ClampToData, Reflecting };

/// Diffusion coefficient of A_t = 1/2 d/dx (a d/dx) with its ellipticity
/// bounds. `a_x` is required only for path simulation.
struct Coefficients {
  SpaceTimeFn a;
  SpaceTimeFn a_x;
  double lambda = 1.0;
  double Lambda = 1.0;

  double sigma(double t, double x) const;
  bool has_derivative() const { return static_cast<bool>(a_x); }
};

/// Semilinear term f(t, x, u, sigma u_x) with its Lipschitz constant in
/// (y, z), its linear-growth constant and the dominating function g.
struct Driver {
  DriverFn f;
  double lipschitz = 0.0;
  double growth = 0.0;
  SpaceTimeFn g;

  /// A driver with zero Lipschitz constant does not see the solution.
  bool depends_on_solution() const { return lipschitz > 0.0; }
};

/// Obstacle h, terminal value phi and the polynomial growth bound
/// |h(t,x)| <= growth_c (1 + x^2)^growth_beta.
struct ObstacleData {
  SpaceTimeFn h;
  SpaceFn phi;
  double growth_c = 0.0;
  double growth_beta = 0.0;
};

/// rho(x) = (1 + x^2)^(-alpha).
struct Weight {
  double alpha = 0.0;

  double operator()(double x) const;
};

struct Truncation {
  double x_lo = -1.0;
  double x_hi = 1.0;
  BoundaryMode mode = BoundaryMode::ClampToData;
};

/// Complete data of the Cauchy obstacle problem on a truncated interval.
/// Immutable after construction; evaluators must be pure.
struct ObstacleProblem {
  Coefficients coefficients;
  Driver driver;
  ObstacleData obstacle;
  double horizon = 1.0;
  Weight weight;
  Truncation truncation;

  /// Dirichlet data used at the truncation ends: max(h(t, x), phi(x)).
  double boundary_value(double t, double x) const;

  /// Copy of this problem with the obstacle replaced.
  ObstacleProblem with_obstacle(SpaceTimeFn h) const;

  /// Throws ValidationFailure when a structural invariant is broken
  /// (T > 0, x_lo < x_hi, 0 < lambda <= Lambda, alpha >= 0, evaluators set).
  void check_invariants() const;
};

/// Outcome of one sampled inequality.
struct HypothesisCheck {
  std::string name;
  double worst_violation = 0.0;  // relative, <= 0 means satisfied everywhere
  bool passed = true;
  double t = 0.0, x = 0.0, y = 0.0, z = 0.0;  // witness
};

struct HypothesisReport {
  std::vector<HypothesisCheck> checks;

  bool passed() const;
  const HypothesisCheck& find(const std::string& name) const;
};

/// Relative violation above which a sampled inequality fails.
inline constexpr double kHypothesisTolerance = 1e-12;

/// Samples Halton probes in Q_T x value space and checks ellipticity, the
/// Lipschitz and growth bounds on f, phi >= h(T, .) and the growth of h.
HypothesisReport validate_hypotheses(const ObstacleProblem& problem, int probe_count,
                                     std::uint64_t seed);

/// Box in which `lipschitz_probe` samples (t, x, y, z).
struct ProbeBox {
  double t_lo = 0.0, t_hi = 1.0;
  double x_lo = -1.0, x_hi = 1.0;
  double value_range = 10.0;
};

/// max |f(y1,z1) - f(y2,z2)| / (|y1-y2| + |z1-z2|) over quasi-random pairs,
/// including axis-aligned pairs that isolate each argument.
double lipschitz_probe(const Driver& driver, int probe_count, std::uint64_t seed,
                       const ProbeBox& box = {});

/// Radical-inverse Halton coordinate of `index` in base `base`.
double halton(std::uint64_t index, int base);

}  // namespace obstacle
