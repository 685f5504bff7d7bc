#include "obstacle/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>

#include "obstacle/csv.hpp"
#include "obstacle/errors.hpp"

namespace obstacle {

CheckItem make_item(std::string label, double discrepancy, double bias_budget,
                    double stat_budget) {
  CheckItem item;
  item.label = std::move(label);
  item.discrepancy = discrepancy;
  item.bias_budget = bias_budget;
  item.stat_budget = stat_budget;
  item.pass = std::isfinite(discrepancy) && discrepancy <= bias_budget + stat_budget;
  return item;
}

bool CheckReport::pass() const {
  return std::all_of(items.begin(), items.end(), [](const CheckItem& i) { return i.pass; });
}

const CheckItem& CheckReport::worst() const {
  if (items.empty()) throw Error(ErrorCode::ValidationFailure, "check " + name + " has no items");
  auto score = [](const CheckItem& i) {
    if (!i.pass) return std::numeric_limits<double>::infinity();
    const double b = i.budget();
    return b > 0.0 ? i.discrepancy / b : (i.discrepancy > 0.0 ? 1.0 : 0.0);
  };
  return *std::max_element(items.begin(), items.end(),
                           [&](const CheckItem& a, const CheckItem& b) { return score(a) < score(b); });
}

std::vector<TestFunction> default_test_functions(double horizon) {
  constexpr double kPi = 3.14159265358979323846;
  return {
      {"one", [](double, double) { return 1.0; }},
      {"cos", [](double, double x) { return std::cos(x); }},
      {"time-bump",
       [horizon](double t, double) {
         const double s = std::sin(kPi * t / horizon);
         return s * s;
       }},
  };
}

namespace {

double relative(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (scale < 1e-14) return 0.0;
  return std::abs(a - b) / scale;
}

double mean_ci(const std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= (n - 1);
  return 1.96 * std::sqrt(var / n);
}

double stderr_ci(double sum, double sum2, long n) {
  if (n < 2) return 0.0;
  const double mean = sum / n;
  const double var = std::max(0.0, (sum2 - n * mean * mean) / (n - 1));
  return 1.96 * std::sqrt(var / n);
}

Field gradient_field(const ObstacleProblem& problem, const SpaceTimeGrid& grid, const Field& u) {
  Field z = grid.zeros();
  for (int k = 0; k <= grid.nt; ++k) {
    z.row(k) = scaled_gradient(problem, grid, k, u.row(k).transpose()).transpose();
  }
  return z;
}

std::string label_at(const std::string& prefix, double s, double x) {
  std::ostringstream os;
  os << prefix << "@(" << s << ";" << x << ")";
  return os.str();
}

}  // namespace

CheckReport check_hypotheses(const ObstacleProblem& problem, int probe_count, std::uint64_t seed) {
  CheckReport rep;
  rep.name = "hypotheses";
  const HypothesisReport hyp = validate_hypotheses(problem, probe_count, seed);
  for (const auto& c : hyp.checks) {
    rep.items.push_back(make_item(c.name, std::max(0.0, c.worst_violation), kHypothesisTolerance));
  }
  const ProbeBox box{0.0, problem.horizon, problem.truncation.x_lo, problem.truncation.x_hi, 10.0};
  const double L_hat = lipschitz_probe(problem.driver, probe_count, seed, box);
  rep.items.push_back(make_item("lipschitz-probe", std::max(0.0, L_hat - problem.driver.lipschitz),
                                problem.driver.lipschitz * 1e-9));
  return rep;
}

CheckReport check_skorokhod(const ObstacleSolution& sol, const Field& h, double tol) {
  CheckReport rep;
  rep.name = "skorokhod";
  rep.items.push_back(make_item(sol.method, skorokhod_ratio(sol, h), tol));
  return rep;
}

CheckReport check_minimality(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                             const std::vector<double>& schedule, const SolverOptions& options,
                             double agreement_tol) {
  CheckReport rep;
  rep.name = "minimality";
  PenalizationStudy study;
  try {
    study = penalization_study(problem, grid, schedule, options);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::MonotonicityViolation) throw;
    rep.items.push_back(make_item("monotone", std::numeric_limits<double>::infinity(), options.mono_tol));
    return rep;
  }
  double above = 0.0;
  for (const auto& s : study.solutions) above = std::max(above, (s.u - study.psor.u).maxCoeff());
  rep.items.push_back(make_item("monotone", study.worst_decrease, options.mono_tol));
  rep.items.push_back(make_item("below-psor", std::max(0.0, above), options.mono_tol));
  rep.items.push_back(make_item("final-gap", study.levels.back().distance_to_psor, agreement_tol));
  return rep;
}

CheckReport check_representation_u(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                                   const ObstacleSolution& sol, const RbsdeEstimate& chain,
                                   const std::vector<std::pair<double, double>>& probes,
                                   const RepresentationInputs& in) {
  CheckReport rep;
  rep.name = "representation-u";
  const double dt_path = in.dt_path > 0.0 ? in.dt_path : grid.dt;
  const double bias = in.c_bias * (grid.dt + grid.dx * grid.dx);
  for (std::size_t j = 0; j < probes.size(); ++j) {
    const auto [s, x] = probes[j];
    const int k = time_index(grid, s);
    const double u = interpolate(sol.u, grid, k, x);
    const double y_chain = interpolate(chain.Y, grid, k, x);
    rep.items.push_back(make_item(label_at("chain", s, x), std::abs(u - y_chain), in.chain_tol));
    const PathEnsemble e =
        simulate_paths(problem, s, x, dt_path, in.paths, in.seed + 7919 * j, in.threads);
    McOptions mc;
    mc.degree = in.degree;
    mc.threads = in.threads;
    const RbsdeEstimate refl = rbsde_reflected_mc(problem, e, mc);
    rep.items.push_back(make_item(label_at("mc", s, x), std::abs(u - refl.y0.value), bias,
                                  3.0 * refl.y0.ci));
  }
  return rep;
}

CheckReport check_representation_z(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                                   const ObstacleSolution& sol, const PathEnsemble& e,
                                   const RbsdeEstimate& reflected, double c_bias) {
  CheckReport rep;
  rep.name = "representation-z";
  const Field zu = gradient_field(problem, grid, sol.u);
  const long m = e.path_count;
  constexpr int kBatches = 10;
  std::vector<double> batch_ms(kBatches, 0.0);
  double ms = 0.0;
  for (int j = 0; j < e.steps; ++j) {
    const int k = time_index(grid, e.t(j));
    for (int b = 0; b < kBatches; ++b) {
      const long lo = m * b / kBatches, hi = m * (b + 1) / kBatches;
      double acc = 0.0;
      for (long p = lo; p < hi; ++p) {
        const double d = interpolate(zu, grid, k, e.X(j, p)) - reflected.Z(j, p);
        acc += d * d;
      }
      ms += acc * e.dt_path / m;
      batch_ms[b] += acc * e.dt_path / (hi - lo);
    }
  }
  std::vector<double> batch_rms;
  for (double v : batch_ms) batch_rms.push_back(std::sqrt(v));
  rep.items.push_back(make_item("z-rms", std::sqrt(ms), c_bias * (grid.dt + grid.dx * grid.dx),
                                3.0 * mean_ci(batch_rms)));
  return rep;
}

CheckReport check_measure_identity(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                                   const ObstacleSolution& sol, const RbsdeEstimate& chain,
                                   double s, double x, const std::vector<TestFunction>& xis,
                                   double tol, MeasureSource source, const PathEnsemble* e,
                                   const RbsdeEstimate* reflected) {
  CheckReport rep;
  rep.name = "measure-identity";
  const int s_index = time_index(grid, s);
  const DensityTable density = solve_density(problem, grid, std::min(s_index, grid.nt - 1),
                                             nearest_node(grid, x));
  for (const auto& test : xis) {
    double right = 0.0;
    double left = 0.0;
    double stat = 0.0;
    for (int k = density.s_index; k < grid.nt; ++k) {
      for (int i = 1; i <= grid.nx; ++i) {
        const double xi = test.xi(grid.t(k), grid.x(i));
        right += xi * density.p(k + 1, i) * sol.r(k, i) * grid.dt;
        left += xi * density.p(k, i) * chain.K(k, i);
      }
    }
    if (source == MeasureSource::ReflectedMc) {
      if (!e || !reflected) throw Error(ErrorCode::ValidationFailure, "reflected-mc source needs an ensemble");
      double sum = 0.0, sum2 = 0.0;
      for (long p = 0; p < e->path_count; ++p) {
        double acc = 0.0;
        for (int j = 0; j < e->steps; ++j) {
          acc += test.xi(e->t(j), e->X(j, p)) * (reflected->K(j + 1, p) - reflected->K(j, p));
        }
        sum += acc;
        sum2 += acc * acc;
      }
      left = sum / e->path_count;
      const double scale = std::max(std::abs(left), std::abs(right));
      stat = scale > 1e-14 ? 3.0 * stderr_ci(sum, sum2, e->path_count) / scale : 0.0;
    }
    rep.items.push_back(make_item(test.name, relative(left, right), tol, stat));
  }
  return rep;
}

CheckReport check_interval_measure(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                                   const ObstacleSolution& sol, const RbsdeEstimate& chain,
                                   double t1, double t2, double f_lo, double f_hi, double tol) {
  CheckReport rep;
  rep.name = "interval-measure";
  const int k1 = time_index(grid, t1);
  const int k2 = std::max(k1, time_index(grid, t2));
  Vector in_f = Vector::Zero(grid.nodes());
  for (int i = 1; i <= grid.nx; ++i) in_f(i) = (grid.x(i) >= f_lo && grid.x(i) <= f_hi) ? 1.0 : 0.0;
  double mu = 0.0;
  Vector v = Vector::Zero(grid.nodes());
  for (int k = k2 - 1; k >= k1; --k) {
    mu += sol.r.row(k).dot(in_f) * grid.dx * grid.dt;
    v = in_f.cwiseProduct(chain.K.row(k).transpose()) + transition_kernel(problem, grid, k).expect(v);
  }
  const double chain_side = v.segment(1, grid.nx).sum() * grid.dx;
  rep.items.push_back(make_item("mass", relative(mu, chain_side), tol));
  return rep;
}

CheckReport check_ac_measure(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                             const ObstacleSolution& sol, const PathEnsemble& e,
                             const RbsdeEstimate& reflected, double c_bias_k,
                             double c_bias_residual) {
  CheckReport rep;
  rep.name = "ac-measure";
  const Field zu = gradient_field(problem, grid, sol.u);
  const long m = e.path_count;
  const int N = e.steps;
  const double dt = e.dt_path;
  const double scale = grid.dt + grid.dx * grid.dx;

  // backward accumulation of the residual R_j per path
  Vector tail(m);
  Vector k_tilde = Vector::Zero(m);
  for (long p = 0; p < m; ++p) tail(p) = problem.obstacle.phi(e.X(N, p));
  std::vector<Vector> increments(N, Vector(m));
  double worst_ms = 0.0;
  constexpr int kBatches = 10;
  std::vector<double> worst_batch(kBatches, 0.0);
  auto record = [&](const Vector& resid) {
    double ms = resid.squaredNorm() / m;
    worst_ms = std::max(worst_ms, ms);
    for (int b = 0; b < kBatches; ++b) {
      const long lo = m * b / kBatches, hi = m * (b + 1) / kBatches;
      worst_batch[b] = std::max(worst_batch[b], resid.segment(lo, hi - lo).squaredNorm() / (hi - lo));
    }
  };
  Vector resid(m);
  for (long p = 0; p < m; ++p) resid(p) = interpolate(sol.u, grid, grid.nt, e.X(N, p)) - tail(p);
  record(resid);
  // dK~_j = r(t_j, X_j) dt
  for (int j = 0; j < N; ++j) {
    const int k = time_index(grid, e.t(j));
    for (long p = 0; p < m; ++p) increments[j](p) = interpolate(sol.r, grid, k, e.X(j, p)) * dt;
  }
  for (int j = N - 1; j >= 0; --j) {
    const double t = e.t(j);
    const int k = time_index(grid, t);
    for (long p = 0; p < m; ++p) {
      const double x = e.X(j, p);
      const double y = interpolate(sol.u, grid, k, x);
      const double z = interpolate(zu, grid, k, x);
      tail(p) += problem.driver.f(t, x, y, z) * dt + increments[j](p) - z * e.dW(j, p);
      resid(p) = y - tail(p);
    }
    record(resid);
  }
  for (int j = 0; j < N; ++j) k_tilde += increments[j];
  rep.items.push_back(make_item("residual", worst_ms, c_bias_residual * scale, 3.0 * mean_ci(worst_batch)));

  double sum = 0.0, sum2 = 0.0, mean_tilde = 0.0, mean_refl = 0.0;
  for (long p = 0; p < m; ++p) {
    const double d = k_tilde(p) - reflected.K(N, p);
    sum += d;
    sum2 += d * d;
    mean_tilde += k_tilde(p) / m;
    mean_refl += reflected.K(N, p) / m;
  }
  rep.items.push_back(make_item("k-mean", std::abs(mean_tilde - mean_refl), c_bias_k * scale,
                                3.0 * stderr_ci(sum, sum2, m)));
  return rep;
}

namespace {

// sum_x E_{0,x}|psi(X_T)|^q rho(x) dx as a vector of expectations
Vector backward_expectation(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                            const std::function<double(double)>& terminal) {
  Vector v(grid.nodes());
  for (int i = 0; i < grid.nodes(); ++i) v(i) = terminal(grid.x(i));
  for (int k = grid.nt - 1; k >= 0; --k) v = transition_kernel(problem, grid, k).expect(v);
  return v;
}

double weighted_sum(const ObstacleProblem& problem, const SpaceTimeGrid& grid, const Vector& v,
                    double power) {
  double s = 0.0;
  for (int i = 0; i < grid.nodes(); ++i) s += v(i) * std::pow(problem.weight(grid.x(i)), power);
  return s * grid.dx;
}

double transfer_ratio(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                      const std::function<double(double)>& psi) {
  auto abs_psi = [&](double x) { return std::abs(psi(x)); };
  const Vector e = backward_expectation(problem, grid, abs_psi);
  Vector direct(grid.nodes());
  for (int i = 0; i < grid.nodes(); ++i) direct(i) = abs_psi(grid.x(i));
  return weighted_sum(problem, grid, e, 1.0) / weighted_sum(problem, grid, direct, 1.0);
}

}  // namespace

CheckReport check_weighted_bounds(const ObstacleProblem& problem, const SpaceTimeGrid& grid,
                                  double refinement_tol, double mass_tol) {
  CheckReport rep;
  rep.name = "weighted-bounds";
  const SpaceTimeGrid fine = SpaceTimeGrid::make(problem, 2 * grid.nx + 1, 2 * grid.nt);
  std::vector<std::pair<std::string, std::function<double(double)>>> probes = {
      {"gaussian", [](double x) { return std::exp(-0.5 * x * x); }},
      {"shifted-bump", [](double x) { return std::exp(-(x - 1.0) * (x - 1.0)); }},
      {"terminal", problem.obstacle.phi},
  };
  rep.items.push_back(make_item("unit", std::abs(transfer_ratio(problem, grid, [](double) { return 1.0; }) - 1.0),
                                mass_tol));

  std::vector<double> base, refined;
  for (const auto& [name, psi] : probes) {
    base.push_back(transfer_ratio(problem, grid, psi));
    refined.push_back(transfer_ratio(problem, fine, psi));
  }
  const double c = *std::min_element(base.begin(), base.end());
  const double C = *std::max_element(base.begin(), base.end());
  for (std::size_t j = 0; j < probes.size(); ++j) {
    // distance of the refined ratio outside the fitted range [c, C], relative
    const double r = refined[j];
    const double outside = r < c ? (c - r) / c : (r > C ? (r - C) / C : 0.0);
    rep.items.push_back(make_item("refine:" + probes[j].first, outside, refinement_tol));
  }

  // g = 1: time-integrated ratio
  {
    Vector v = Vector::Ones(grid.nodes());
    double num = 0.0, den = 0.0;
    for (int k = grid.nt - 1; k >= 0; --k) {
      v = transition_kernel(problem, grid, k).expect(v);
      num += weighted_sum(problem, grid, v, 1.0) * grid.dt;
      den += weighted_sum(problem, grid, Vector::Ones(grid.nodes()), 1.0) * grid.dt;
    }
    rep.items.push_back(make_item("g-unit", std::abs(num / den - 1.0), mass_tol));
  }

  // pointwise shape E|psi(X_T)|^2 <= C rho^-2(x) T^-1/2 |psi|^2_{2,rho}; the
  // fitted C must survive refinement
  auto shape_constant = [&](const SpaceTimeGrid& g) {
    double shape = 0.0;
    for (const auto& [name, psi] : probes) {
      auto sq = [&](double x) { return psi(x) * psi(x); };
      const Vector e2 = backward_expectation(problem, g, sq);
      Vector direct(g.nodes());
      for (int i = 0; i < g.nodes(); ++i) direct(i) = sq(g.x(i));
      const double norm = weighted_sum(problem, g, direct, 2.0);
      if (norm <= 0.0) continue;
      for (int i = 0; i < g.nodes(); ++i) {
        shape = std::max(shape, e2(i) * std::pow(problem.weight(g.x(i)), 2) *
                                    std::sqrt(g.horizon()) / norm);
      }
    }
    return shape;
  };
  rep.items.push_back(make_item("kernel-shape", relative(shape_constant(grid), shape_constant(fine)),
                                refinement_tol));
  return rep;
}

const std::vector<std::string>& all_check_names() {
  static const std::vector<std::string> names = {
      "hypotheses",       "skorokhod",        "minimality", "representation-u", "representation-z",
      "measure-identity", "interval-measure", "ac-measure", "weighted-bounds"};
  return names;
}

std::vector<CheckReport> run_checks(const Scenario& sc, const std::vector<std::string>& names,
                                    int threads) {
  for (const auto& n : names) {
    if (std::find(all_check_names().begin(), all_check_names().end(), n) == all_check_names().end()) {
      throw Error(ErrorCode::ValidationFailure, "unknown check " + n);
    }
  }
  const ObstacleProblem& problem = sc.problem;
  const SpaceTimeGrid grid = SpaceTimeGrid::make(problem, sc.nx, sc.nt);
  const Field h = obstacle_field(problem, grid);
  const ObstacleSolution psor = solve_psor(problem, grid, sc.tolerances);
  const int s_index = time_index(grid, sc.mc.s);
  const RbsdeEstimate chain = rbsde_chain_dp(problem, grid, s_index, nearest_node(grid, sc.mc.x));
  const double dt_path = sc.mc.dt_path > 0.0 ? sc.mc.dt_path : grid.dt;

  std::unique_ptr<PathEnsemble> ensemble;
  std::unique_ptr<RbsdeEstimate> reflected;
  auto need_paths = [&] {
    if (ensemble) return;
    ensemble = std::make_unique<PathEnsemble>(
        simulate_paths(problem, sc.mc.s, sc.mc.x, dt_path, sc.mc.paths, sc.mc.seed, threads));
    McOptions mc;
    mc.degree = sc.mc.degree;
    mc.threads = threads;
    reflected = std::make_unique<RbsdeEstimate>(rbsde_reflected_mc(problem, *ensemble, mc));
  };

  std::ostringstream prov;
  prov << "scenario=" << sc.name << " hash=" << sc.hash << " nx=" << sc.nx << " nt=" << sc.nt
       << " M=" << sc.mc.paths << " seed=" << sc.mc.seed;

  std::vector<CheckReport> out;
  for (const auto& name : names) {
    CheckReport rep;
    if (name == "hypotheses") {
      rep = check_hypotheses(problem, 4096, sc.mc.seed);
    } else if (name == "skorokhod") {
      rep = check_skorokhod(psor, h, sc.verify.skorokhod_tol);
    } else if (name == "minimality") {
      rep = check_minimality(problem, grid,
                             power_schedule(sc.verify.penalty_first, sc.verify.penalty_last),
                             sc.tolerances, sc.verify.agreement_tol);
    } else if (name == "representation-u") {
      RepresentationInputs in;
      in.paths = sc.mc.paths;
      in.dt_path = sc.mc.dt_path;
      in.seed = sc.mc.seed;
      in.degree = sc.mc.degree;
      in.threads = threads;
      in.c_bias = sc.calibration.c_bias_u;
      in.chain_tol = sc.verify.chain_tol;
      rep = check_representation_u(problem, grid, psor, chain, sc.mc.probes, in);
    } else if (name == "representation-z") {
      need_paths();
      rep = check_representation_z(problem, grid, psor, *ensemble, *reflected, sc.calibration.c_bias_z);
    } else if (name == "measure-identity") {
      const MeasureSource source =
          sc.verify.measure_source == "reflected-mc" ? MeasureSource::ReflectedMc : MeasureSource::Chain;
      if (source == MeasureSource::ReflectedMc) need_paths();
      rep = check_measure_identity(problem, grid, psor, chain, sc.mc.s, sc.mc.x,
                                   default_test_functions(problem.horizon), sc.verify.measure_tol,
                                   source, ensemble.get(), reflected.get());
    } else if (name == "interval-measure") {
      // middle half of the truncation: mass absorbed at the boundary nodes
      // never reaches the chain side
      const double quarter = 0.25 * (problem.truncation.x_hi - problem.truncation.x_lo);
      rep = check_interval_measure(problem, grid, psor, chain, 0.0, problem.horizon,
                                   problem.truncation.x_lo + quarter,
                                   problem.truncation.x_hi - quarter, sc.verify.measure_tol);
    } else if (name == "ac-measure") {
      need_paths();
      rep = check_ac_measure(problem, grid, psor, *ensemble, *reflected, sc.calibration.c_bias_k,
                             sc.calibration.c_bias_residual);
    } else if (name == "weighted-bounds") {
      rep = check_weighted_bounds(problem, grid, sc.verify.refinement_tol, sc.verify.mass_tol);
    }
    rep.name = name;
    rep.provenance = prov.str();
    out.push_back(std::move(rep));
  }
  return out;
}

Calibration calibrate(const Scenario& scenario, const std::vector<int>& levels, int threads,
                      double safety) {
  Calibration c;
  for (int level : levels) {
    Scenario sc = scenario;
    sc.nx = level;
    sc.nt = level;
    sc.mc.seed = scenario.mc.seed + 1;
    sc.calibration = Calibration{};
    const SpaceTimeGrid grid = SpaceTimeGrid::make(sc.problem, level, level);
    const double scale = grid.dt + grid.dx * grid.dx;
    const auto reports = run_checks(sc, {"representation-u", "representation-z", "ac-measure"}, threads);
    for (const auto& rep : reports) {
      for (const auto& item : rep.items) {
        // The discrepancy itself is the bias estimate. Subtracting the stat
        // budget here would turn it into a lower bound and miss small biases.
        const double excess = item.discrepancy / scale;
        if (item.label.rfind("mc@", 0) == 0) c.c_bias_u = std::max(c.c_bias_u, excess);
        if (item.label == "z-rms") c.c_bias_z = std::max(c.c_bias_z, excess);
        if (item.label == "k-mean") c.c_bias_k = std::max(c.c_bias_k, excess);
        if (item.label == "residual") c.c_bias_residual = std::max(c.c_bias_residual, excess);
      }
    }
  }
  c.c_bias_u *= safety;
  c.c_bias_z *= safety;
  c.c_bias_k *= safety;
  c.c_bias_residual *= safety;
  return c;
}

void write_report_csv(std::ostream& os, const std::vector<CheckReport>& reports) {
  CsvWriter csv(os);
  if (!reports.empty()) csv.comment(reports.front().provenance);
  csv.comment("units: discrepancies and budgets in the units of the checked quantity");
  csv.header({"check", "item", "discrepancy", "bias_budget", "stat_budget", "budget", "pass"});
  for (const auto& rep : reports) {
    for (const auto& item : rep.items) {
      csv.cells({rep.name, item.label, format_number(item.discrepancy), format_number(item.bias_budget),
                 format_number(item.stat_budget), format_number(item.budget()),
                 item.pass ? "1" : "0"});
    }
  }
}

void write_report_summary(std::ostream& os, const std::vector<CheckReport>& reports) {
  for (const auto& rep : reports) {
    const CheckItem& w = rep.worst();
    os << (rep.pass() ? "PASS " : "FAIL ") << rep.name << " worst=" << w.label
       << " discrepancy=" << format_number(w.discrepancy) << " budget=" << format_number(w.budget())
       << '\n';
  }
}

}  // namespace obstacle
