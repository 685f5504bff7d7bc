#include "obstacle/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "obstacle/errors.hpp"

namespace obstacle {

double Coefficients::sigma(double t, double x) const { return std::sqrt(a(t, x)); }

double Weight::operator()(double x) const { return std::pow(1.0 + x * x, -alpha); }

double ObstacleProblem::boundary_value(double t, double x) const {
  return std::max(obstacle.h(t, x), obstacle.phi(x));
}

ObstacleProblem ObstacleProblem::with_obstacle(SpaceTimeFn h) const {
  ObstacleProblem copy = *this;
  copy.obstacle.h = std::move(h);
  return copy;
}

void ObstacleProblem::check_invariants() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::ValidationFailure, what); };
  if (!(horizon > 0.0)) fail("horizon must be positive");
  if (!(truncation.x_lo < truncation.x_hi)) fail("truncation requires x_lo < x_hi");
  if (!(coefficients.lambda > 0.0) || !(coefficients.lambda <= coefficients.Lambda)) {
    fail("ellipticity bounds require 0 < lambda <= Lambda");
  }
  if (!(weight.alpha >= 0.0)) fail("weight exponent alpha must be nonnegative");
  if (!(driver.lipschitz >= 0.0) || !(driver.growth >= 0.0)) {
    fail("driver constants must be nonnegative");
  }
  if (!coefficients.a || !driver.f || !driver.g || !obstacle.h || !obstacle.phi) {
    fail("problem has an unset evaluator");
  }
}

double halton(std::uint64_t index, int base) {
  double result = 0.0;
  double f = 1.0;
  while (index > 0) {
    f /= base;
    result += f * static_cast<double>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
  }
  return result;
}

namespace {

double finite_or_throw(double v, const char* what, double t, double x) {
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << what << " is not finite at (t=" << t << ", x=" << x << ")";
    throw Error(ErrorCode::EvaluatorFailure, os.str());
  }
  return v;
}

struct Tracker {
  HypothesisCheck check;

  explicit Tracker(std::string name) {
    check.name = std::move(name);
    check.worst_violation = -std::numeric_limits<double>::infinity();
  }

  void record(double lhs, double rhs, double t, double x, double y, double z) {
    const double violation = (lhs - rhs) / std::max(1.0, std::abs(rhs));
    if (violation > check.worst_violation) {
      check.worst_violation = violation;
      check.t = t;
      check.x = x;
      check.y = y;
      check.z = z;
    }
  }

  HypothesisCheck finish() {
    if (!std::isfinite(check.worst_violation)) check.worst_violation = 0.0;
    check.passed = check.worst_violation <= kHypothesisTolerance;
    return check;
  }
};

std::uint64_t probe_offset(std::uint64_t seed) { return 1 + (seed % 100003) * 7919; }

}  // namespace

bool HypothesisReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const HypothesisCheck& HypothesisReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw Error(ErrorCode::ValidationFailure, "no hypothesis named " + name);
}

HypothesisReport validate_hypotheses(const ObstacleProblem& problem, int probe_count,
                                     std::uint64_t seed) {
  if (probe_count < 1) throw Error(ErrorCode::ValidationFailure, "probe_count must be >= 1");
  problem.check_invariants();

  const auto& c = problem.coefficients;
  const auto& d = problem.driver;
  const auto& o = problem.obstacle;
  const double T = problem.horizon;
  const double x_lo = problem.truncation.x_lo;
  const double x_hi = problem.truncation.x_hi;
  constexpr double R = 10.0;

  Tracker ellipticity("ellipticity");
  Tracker lipschitz("lipschitz");
  Tracker growth("growth");
  Tracker terminal("terminal-above-obstacle");
  Tracker obstacle_growth("obstacle-growth");

  auto driver_at = [&](double t, double x, double y, double z) {
    return finite_or_throw(d.f(t, x, y, z), "driver f", t, x);
  };
  auto lipschitz_pair = [&](double t, double x, double y1, double z1, double y2, double z2) {
    const double df = std::abs(driver_at(t, x, y1, z1) - driver_at(t, x, y2, z2));
    lipschitz.record(df, d.lipschitz * (std::abs(y1 - y2) + std::abs(z1 - z2)), t, x, y1, z1);
  };

  const std::uint64_t offset = probe_offset(seed);
  for (int i = 0; i < probe_count; ++i) {
    const std::uint64_t k = offset + static_cast<std::uint64_t>(i);
    const double t = T * halton(k, 2);
    const double x = x_lo + (x_hi - x_lo) * halton(k, 3);
    const double y1 = R * (2.0 * halton(k, 5) - 1.0);
    const double z1 = R * (2.0 * halton(k, 7) - 1.0);
    const double y2 = R * (2.0 * halton(k, 11) - 1.0);
    const double z2 = R * (2.0 * halton(k, 13) - 1.0);

    const double a = finite_or_throw(c.a(t, x), "coefficient a", t, x);
    ellipticity.record(c.lambda, a, t, x, 0.0, 0.0);
    ellipticity.record(a, c.Lambda, t, x, 0.0, 0.0);

    lipschitz_pair(t, x, y1, z1, y2, z2);
    lipschitz_pair(t, x, y1, z1, y2, z1);
    lipschitz_pair(t, x, y1, z1, y1, z2);

    const double g = finite_or_throw(d.g(t, x), "dominating g", t, x);
    growth.record(std::abs(driver_at(t, x, y1, z1)), g + d.growth * (std::abs(y1) + std::abs(z1)),
                  t, x, y1, z1);

    const double phi = finite_or_throw(o.phi(x), "terminal phi", T, x);
    const double h_T = finite_or_throw(o.h(T, x), "obstacle h", T, x);
    terminal.record(h_T, phi, T, x, 0.0, 0.0);

    const double h = finite_or_throw(o.h(t, x), "obstacle h", t, x);
    obstacle_growth.record(std::abs(h), o.growth_c * std::pow(1.0 + x * x, o.growth_beta), t, x,
                           0.0, 0.0);
  }

  HypothesisReport report;
  report.checks = {ellipticity.finish(), lipschitz.finish(), growth.finish(), terminal.finish(),
                   obstacle_growth.finish()};
  return report;
}

double lipschitz_probe(const Driver& driver, int probe_count, std::uint64_t seed,
                       const ProbeBox& box) {
  if (probe_count < 2) throw Error(ErrorCode::ValidationFailure, "probe_count must be >= 2");
  const double R = box.value_range;
  double best = 0.0;
  auto ratio = [&](double t, double x, double y1, double z1, double y2, double z2) {
    const double dv = std::abs(y1 - y2) + std::abs(z1 - z2);
    if (dv == 0.0) return;
    const double f1 = finite_or_throw(driver.f(t, x, y1, z1), "driver f", t, x);
    const double f2 = finite_or_throw(driver.f(t, x, y2, z2), "driver f", t, x);
    best = std::max(best, std::abs(f1 - f2) / dv);
  };
  const std::uint64_t offset = probe_offset(seed);
  for (int i = 0; i < probe_count; ++i) {
    const std::uint64_t k = offset + static_cast<std::uint64_t>(i);
    const double t = box.t_lo + (box.t_hi - box.t_lo) * halton(k, 2);
    const double x = box.x_lo + (box.x_hi - box.x_lo) * halton(k, 3);
    const double y1 = R * (2.0 * halton(k, 5) - 1.0);
    const double z1 = R * (2.0 * halton(k, 7) - 1.0);
    const double y2 = R * (2.0 * halton(k, 11) - 1.0);
    const double z2 = R * (2.0 * halton(k, 13) - 1.0);
    ratio(t, x, y1, z1, y2, z2);
    ratio(t, x, y1, z1, y2, z1);
    ratio(t, x, y1, z1, y1, z2);
  }
  return best;
}

}  // namespace obstacle
