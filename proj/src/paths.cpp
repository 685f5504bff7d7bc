#include <algorithm>
#include <cmath>

#include "obstacle/errors.hpp"
#include "obstacle/parallel.hpp"
#include "obstacle/random.hpp"
#include "obstacle/stochastic.hpp"

namespace obstacle {

int path_steps(double span, double dt_path) {
  return std::max(1, static_cast<int>(std::ceil(span / dt_path - 1e-9)));
}

PathEnsemble PathEnsemble::slice(long first, long count) const {
  PathEnsemble e = *this;
  e.path_count = count;
  e.X = X.middleCols(first, count);
  e.dW = dW.middleCols(first, count);
  return e;
}

namespace {

void check_path_request(const ObstacleProblem& problem, double s, double dt_path, long count) {
  if (!problem.coefficients.has_derivative()) {
    throw Error(ErrorCode::MissingDerivative, "path simulation needs the derivative a_x");
  }
  if (!(s >= 0.0 && s < problem.horizon)) throw Error(ErrorCode::ValidationFailure, "start time outside [0, T)");
  if (!(dt_path > 0.0) || dt_path > problem.horizon - s + 1e-12) {
    throw Error(ErrorCode::ValidationFailure, "dt_path must lie in (0, T - s]");
  }
  if (count < 1) throw Error(ErrorCode::ValidationFailure, "path_count must be >= 1");
}

// One Euler-Maruyama step.
inline double euler(const Coefficients& c, double t, double x, double dt, double dw) {
  return x + 0.5 * c.a_x(t, x) * dt + std::sqrt(c.a(t, x)) * dw;
}

Estimate batch_ratio(const std::vector<double>& num, const std::vector<double>& den, int batches) {
  const long m = static_cast<long>(num.size());
  double sn = 0.0, sd = 0.0;
  for (long j = 0; j < m; ++j) {
    sn += num[j];
    sd += den[j];
  }
  Estimate e;
  e.value = sn / sd;
  if (m < batches || batches < 2) return e;
  std::vector<double> ratios;
  for (int b = 0; b < batches; ++b) {
    const long lo = m * b / batches, hi = m * (b + 1) / batches;
    double bn = 0.0, bd = 0.0;
    for (long j = lo; j < hi; ++j) {
      bn += num[j];
      bd += den[j];
    }
    ratios.push_back(bn / bd);
  }
  double mean = 0.0;
  for (double r : ratios) mean += r;
  mean /= batches;
  double var = 0.0;
  for (double r : ratios) var += (r - mean) * (r - mean);
  var /= (batches - 1);
  e.ci = 1.96 * std::sqrt(var / batches);
  return e;
}

}  // namespace

PathEnsemble simulate_paths(const ObstacleProblem& problem, double s, double x, double dt_path,
                            long path_count, std::uint64_t seed, int threads) {
  check_path_request(problem, s, dt_path, path_count);
  PathEnsemble e;
  e.s_start = s;
  e.x_start = x;
  e.steps = path_steps(problem.horizon - s, dt_path);
  e.dt_path = (problem.horizon - s) / e.steps;
  e.path_count = path_count;
  e.seed = seed;
  e.X.resize(e.steps + 1, path_count);
  e.dW.resize(e.steps, path_count);
  const Philox4x32 gen(seed);
  const double sqdt = std::sqrt(e.dt_path);
  const Coefficients& c = problem.coefficients;
  for_each_block(block_count(path_count), threads, [&](int b) {
    const long lo = static_cast<long>(b) * kPathBlock;
    const long hi = std::min(path_count, lo + kPathBlock);
    for (long p = lo; p < hi; ++p) {
      NormalStream normal(gen, static_cast<std::uint64_t>(p), kPathStream);
      double xp = x;
      e.X(0, p) = xp;
      for (int j = 0; j < e.steps; ++j) {
        const double dw = sqdt * normal(static_cast<std::uint32_t>(j));
        e.dW(j, p) = dw;
        xp = euler(c, e.t(j), xp, e.dt_path, dw);
        e.X(j + 1, p) = xp;
      }
    }
  });
  return e;
}

MomentRatio moment_ratio_probe(const PathEnsemble& ensemble, double p_exponent) {
  if (!(p_exponent >= 4.0)) throw Error(ErrorCode::ValidationFailure, "moment probe needs p >= 4");
  const long m = ensemble.path_count;
  std::vector<double> sup(m), term(m);
  for (long p = 0; p < m; ++p) {
    double best = 0.0;
    for (int j = 0; j <= ensemble.steps; ++j) best = std::max(best, std::abs(ensemble.X(j, p)));
    sup[p] = std::pow(best, p_exponent);
    term[p] = std::pow(std::abs(ensemble.X(ensemble.steps, p)), p_exponent);
  }
  MomentRatio r;
  r.ratio = batch_ratio(sup, term, 10);
  for (long p = 0; p < m; ++p) {
    r.sup_moment += sup[p] / m;
    r.terminal_moment += term[p] / m;
  }
  return r;
}

MomentRatio moment_ratio_stream(const ObstacleProblem& problem, double s, double x,
                                double dt_path, long path_count, std::uint64_t seed,
                                double p_exponent, int threads) {
  check_path_request(problem, s, dt_path, path_count);
  if (!(p_exponent >= 4.0)) throw Error(ErrorCode::ValidationFailure, "moment probe needs p >= 4");
  const int steps = path_steps(problem.horizon - s, dt_path);
  const double dt = (problem.horizon - s) / steps;
  const double sqdt = std::sqrt(dt);
  const Philox4x32 gen(seed);
  const Coefficients& c = problem.coefficients;
  std::vector<double> sup(path_count), term(path_count);
  for_each_block(block_count(path_count), threads, [&](int b) {
    const long lo = static_cast<long>(b) * kPathBlock;
    const long hi = std::min(path_count, lo + kPathBlock);
    for (long p = lo; p < hi; ++p) {
      NormalStream normal(gen, static_cast<std::uint64_t>(p), kPathStream);
      double xp = x;
      double best = std::abs(xp);
      for (int j = 0; j < steps; ++j) {
        xp = euler(c, s + j * dt, xp, dt, sqdt * normal(static_cast<std::uint32_t>(j)));
        best = std::max(best, std::abs(xp));
      }
      sup[p] = std::pow(best, p_exponent);
      term[p] = std::pow(std::abs(xp), p_exponent);
    }
  });
  MomentRatio r;
  r.ratio = batch_ratio(sup, term, 10);
  for (long p = 0; p < path_count; ++p) {
    r.sup_moment += sup[p] / path_count;
    r.terminal_moment += term[p] / path_count;
  }
  return r;
}

Estimate estimate_g_integral(const PathEnsemble& ensemble, const SpaceTimeFn& g) {
  const long m = ensemble.path_count;
  double sum = 0.0, sum2 = 0.0;
  for (long p = 0; p < m; ++p) {
    double acc = 0.0;
    double prev = std::pow(g(ensemble.t(0), ensemble.X(0, p)), 2);
    for (int j = 1; j <= ensemble.steps; ++j) {
      const double cur = std::pow(g(ensemble.t(j), ensemble.X(j, p)), 2);
      acc += 0.5 * (prev + cur) * ensemble.dt_path;
      prev = cur;
    }
    sum += acc;
    sum2 += acc * acc;
  }
  Estimate e;
  e.value = sum / m;
  if (m > 1) {
    const double var = std::max(0.0, (sum2 - m * e.value * e.value) / (m - 1));
    e.ci = 1.96 * std::sqrt(var / m);
  }
  return e;
}

}  // namespace obstacle
