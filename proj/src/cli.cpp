#include "obstacle/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "obstacle/csv.hpp"
#include "obstacle/errors.hpp"
#include "obstacle/scenario.hpp"
#include "obstacle/stochastic.hpp"
#include "obstacle/verify.hpp"

namespace obstacle {
namespace {

struct Globals {
  std::string scenario;
  std::string out_dir;
  long long seed = -1;
  int threads = 1;
};

struct Context {
  Scenario sc;
  SpaceTimeGrid grid;
  Provenance prov;
  std::ostream& out;
  std::string out_dir;
  int threads;
};

Context load(const Globals& g, std::ostream& out) {
  if (g.scenario.empty()) throw Error(ErrorCode::ConfigError, "--scenario is required");
  if (g.threads < 1) throw Error(ErrorCode::ConfigError, "--threads must be at least 1");
  Scenario sc = load_scenario(g.scenario);
  if (g.seed >= 0) sc.mc.seed = static_cast<std::uint64_t>(g.seed);
  const HypothesisReport hyp = validate_hypotheses(sc.problem, 4096, sc.mc.seed);
  if (!hyp.passed()) {
    for (const auto& c : hyp.checks) {
      if (!c.passed) throw Error(ErrorCode::ValidationFailure, "hypothesis " + c.name + " violated");
    }
  }
  SpaceTimeGrid grid = SpaceTimeGrid::make(sc.problem, sc.nx, sc.nt);
  Provenance prov{sc.name, sc.hash, sc.mc.seed, ""};
  return Context{std::move(sc), std::move(grid), prov, out, g.out_dir, g.threads};
}

// Opens <out>/<name>; without --out the table goes to stdout.
class Sink {
 public:
  Sink(const Context& ctx, const std::string& name) {
    if (ctx.out_dir.empty()) {
      os_ = &ctx.out;
      return;
    }
    std::filesystem::create_directories(ctx.out_dir);
    file_.open(std::filesystem::path(ctx.out_dir) / name);
    if (!file_) throw Error(ErrorCode::ConfigError, "cannot write " + name);
    os_ = &file_;
  }
  std::ostream& stream() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_ = nullptr;
};

Provenance with_units(Provenance p, std::string units) {
  p.units = std::move(units);
  return p;
}

void write_field_csv(std::ostream& os, const Context& ctx, const ObstacleSolution& sol) {
  const Field h = obstacle_field(ctx.sc.problem, ctx.grid);
  CsvWriter csv(os);
  csv.provenance(with_units(ctx.prov, "t and x in model units; u, h in value units; r per unit time"));
  csv.header({"t", "x", "u", "h", "r", "contact"});
  for (int k = 0; k <= ctx.grid.nt; ++k) {
    for (int i = 0; i < ctx.grid.nodes(); ++i) {
      csv.row({ctx.grid.t(k), ctx.grid.x(i), sol.u(k, i), h(k, i), sol.r(k, i),
               sol.contact(k, i) ? 1.0 : 0.0});
    }
  }
}

int cmd_solve(const Context& ctx, const std::string& method, double penalty) {
  const auto& sc = ctx.sc;
  const Field h = obstacle_field(sc.problem, ctx.grid);
  ObstacleSolution sol;
  if (method == "psor") {
    sol = solve_psor(sc.problem, ctx.grid, sc.tolerances);
  } else {
    const PenalizedSolution pen = solve_penalized(sc.problem, ctx.grid, penalty, sc.tolerances);
    sol = as_obstacle_solution(pen, h, contact_tolerance(h, sc.tolerances.contact_tol_rel));
  }
  {
    Sink sink(ctx, "solution.csv");
    write_field_csv(sink.stream(), ctx, sol);
  }
  Sink sink(ctx, "diagnostics.csv");
  CsvWriter csv(sink.stream());
  csv.provenance(with_units(ctx.prov, "dimensionless"));
  csv.header({"method", "penalty", "iterations", "max_residual", "skorokhod"});
  csv.cells({method, format_number(method == "psor" ? 0.0 : penalty),
             std::to_string(sol.diagnostics.total_iterations),
             format_number(sol.diagnostics.max_residual), format_number(skorokhod_ratio(sol, h))});
  return 0;
}

int study_penalization(const Context& ctx, Sink& sink) {
  const auto& sc = ctx.sc;
  const PenalizationStudy st = penalization_study(
      sc.problem, ctx.grid, power_schedule(sc.verify.penalty_first, sc.verify.penalty_last),
      sc.tolerances);
  CsvWriter csv(sink.stream());
  csv.provenance(with_units(ctx.prov, "distances in value units"));
  csv.header({"n", "sup_increment", "norm_increment", "distance_to_psor", "skorokhod"});
  for (const auto& l : st.levels) {
    csv.row({l.n, l.sup_increment, l.norm_increment, l.distance_to_psor, l.skorokhod});
    // once a level equals the reflected solution to round-off, the rest repeat it
    if (l.distance_to_psor <= 1e-12) break;
  }
  return 0;
}

int study_picard(const Context& ctx, Sink& sink) {
  const PicardResult res = picard_outer(ctx.sc.problem, ctx.grid, InnerMethod::Psor, ctx.sc.tolerances);
  CsvWriter csv(sink.stream());
  csv.provenance(with_units(ctx.prov, "weighted energy norm"));
  csv.comment("gamma=" + format_number(res.trace.gamma));
  csv.header({"iteration", "distance", "ratio"});
  for (std::size_t j = 0; j < res.trace.distances.size(); ++j) {
    const double ratio = j == 0 ? 0.0 : res.trace.ratios[j - 1];
    csv.row({static_cast<double>(j + 1), res.trace.distances[j], ratio});
  }
  return 0;
}

int study_stability(const Context& ctx, Sink& sink, double shift) {
  const auto& p = ctx.sc.problem;
  const SpaceTimeFn h1 = p.obstacle.h;
  const SpaceTimeFn h2 = [h1, shift](double t, double x) { return h1(t, x) - shift; };
  const StabilityReport rep = obstacle_stability(p, ctx.grid, h1, h2, ctx.sc.tolerances);
  CsvWriter csv(sink.stream());
  csv.provenance(with_units(ctx.prov, "distances in value units"));
  csv.header({"obstacle_distance", "solution_distance", "ratio", "pass"});
  csv.row({rep.obstacle_distance, rep.solution_distance, rep.ratio, rep.passed ? 1.0 : 0.0});
  return rep.passed ? 0 : 1;
}

int study_energy(const Context& ctx, Sink& sink) {
  const int base = ctx.sc.nt;
  const EnergyRate er =
      energy_rate_study(ctx.sc.problem, ctx.sc.nx, {base / 2, base, 2 * base}, ctx.sc.tolerances);
  CsvWriter csv(sink.stream());
  csv.provenance(with_units(ctx.prov, "squared weighted value units"));
  csv.comment("rate=" + format_number(er.rate));
  csv.header({"nt", "sup_residual"});
  for (std::size_t j = 0; j < er.nts.size(); ++j) csv.row({double(er.nts[j]), er.residuals[j]});
  return 0;
}

int study_calibration(const Context& ctx, Sink& sink) {
  const Calibration c = calibrate(ctx.sc, {50, 100, 200}, ctx.threads);
  std::ostream& os = sink.stream();
  os << "# scenario=" << ctx.sc.name << " hash=" << ctx.sc.hash << " seed=" << ctx.sc.mc.seed + 1 << '\n';
  os << "calibration.c_bias_u = " << format_number(c.c_bias_u) << '\n';
  os << "calibration.c_bias_z = " << format_number(c.c_bias_z) << '\n';
  os << "calibration.c_bias_k = " << format_number(c.c_bias_k) << '\n';
  os << "calibration.c_bias_residual = " << format_number(c.c_bias_residual) << '\n';
  return 0;
}

int cmd_study(const Context& ctx, const std::string& study, double shift) {
  Sink sink(ctx, "study_" + study + ".csv");
  if (study == "penalization") return study_penalization(ctx, sink);
  if (study == "picard") return study_picard(ctx, sink);
  if (study == "stability") return study_stability(ctx, sink, shift);
  if (study == "energy") return study_energy(ctx, sink);
  return study_calibration(ctx, sink);
}

std::vector<std::string> split_checks(const std::string& list) {
  if (list == "all") return all_check_names();
  std::vector<std::string> names;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) names.push_back(item);
  }
  if (names.empty()) throw Error(ErrorCode::ConfigError, "empty --checks list");
  return names;
}

int cmd_verify(const Context& ctx, const std::string& checks) {
  const auto reports = run_checks(ctx.sc, split_checks(checks), ctx.threads);
  {
    Sink sink(ctx, "verify.csv");
    write_report_csv(sink.stream(), reports);
  }
  if (!ctx.out_dir.empty()) write_report_summary(ctx.out, reports);
  for (const auto& r : reports) {
    if (!r.pass()) return 1;
  }
  return 0;
}

Scheme parse_scheme(const std::string& s) {
  if (s == "chain-dp") return Scheme::ChainDp;
  if (s == "penalized-mc") return Scheme::PenalizedMc;
  return Scheme::ReflectedMc;
}

int cmd_simulate(const Context& ctx, const std::string& scheme_name, double s, double x,
                 double penalty, bool density) {
  const auto& sc = ctx.sc;
  const Scheme scheme = parse_scheme(scheme_name);
  RbsdeEstimate est;
  if (scheme == Scheme::ChainDp) {
    est = rbsde_chain_dp(sc.problem, ctx.grid, time_index(ctx.grid, s), nearest_node(ctx.grid, x),
                         sc.tolerances);
  } else {
    const double dt = sc.mc.dt_path > 0.0 ? sc.mc.dt_path : ctx.grid.dt;
    const PathEnsemble e = simulate_paths(sc.problem, s, x, dt, sc.mc.paths, sc.mc.seed, ctx.threads);
    McOptions mc;
    mc.degree = sc.mc.degree;
    mc.threads = ctx.threads;
    est = scheme == Scheme::PenalizedMc ? rbsde_penalized_mc(sc.problem, e, penalty, mc)
                                        : rbsde_reflected_mc(sc.problem, e, mc);
  }
  {
    Sink sink(ctx, "simulate.csv");
    CsvWriter csv(sink.stream());
    csv.provenance(with_units(ctx.prov, "value units; ci is a 95% half-width"));
    csv.header({"scheme", "s", "x", "y0", "ci", "z0"});
    csv.cells({to_string(scheme), format_number(s), format_number(x), format_number(est.y0.value),
               format_number(est.y0.ci), format_number(est.z0)});
  }
  if (density) {
    const int k = std::min(time_index(ctx.grid, s), ctx.grid.nt - 1);
    const DensityTable table = solve_density(sc.problem, ctx.grid, k, nearest_node(ctx.grid, x));
    Sink sink(ctx, "density.csv");
    CsvWriter csv(sink.stream());
    csv.provenance(with_units(ctx.prov, "density per unit length"));
    write_density_csv(sink.stream(), table, ctx.grid);
  }
  return 0;
}

int cmd_stop_value(const Context& ctx, double s, double x) {
  const auto& sc = ctx.sc;
  const ObstacleSolution sol = solve_psor(sc.problem, ctx.grid, sc.tolerances);
  const RbsdeEstimate chain = rbsde_chain_dp(sc.problem, ctx.grid, time_index(ctx.grid, s),
                                             nearest_node(ctx.grid, x), sc.tolerances);
  const double dt = sc.mc.dt_path > 0.0 ? sc.mc.dt_path : ctx.grid.dt;
  const PathEnsemble e = simulate_paths(sc.problem, s, x, dt, sc.mc.paths, sc.mc.seed, ctx.threads);
  const StoppingValue v = optimal_stopping_value(sc.problem, ctx.grid, sol, e, &chain.running);
  Sink sink(ctx, "stop_value.csv");
  CsvWriter csv(sink.stream());
  csv.provenance(with_units(ctx.prov, "value units; ci is a 95% half-width"));
  csv.header({"s", "x", "rule_value", "ci", "snell_value", "gap", "stopped_early"});
  csv.row({s, x, v.rule_value.value, v.rule_value.ci, v.snell_value, v.gap, v.stopped_early});
  return 0;
}

int cmd_moments(const Context& ctx, double p, double s, double x) {
  const auto& sc = ctx.sc;
  const double dt = sc.mc.dt_path > 0.0 ? sc.mc.dt_path : ctx.grid.dt;
  const MomentRatio base =
      moment_ratio_stream(sc.problem, s, x, dt, sc.mc.paths, sc.mc.seed, p, ctx.threads);
  const MomentRatio fine =
      moment_ratio_stream(sc.problem, s, x, dt / 2, 4 * sc.mc.paths, sc.mc.seed, p, ctx.threads);
  Sink sink(ctx, "moments.csv");
  CsvWriter csv(sink.stream());
  csv.provenance(with_units(ctx.prov, "dimensionless ratios"));
  csv.header({"dt_path", "paths", "ratio", "ci", "sup_moment", "terminal_moment"});
  csv.row({dt, double(sc.mc.paths), base.ratio.value, base.ratio.ci, base.sup_moment, base.terminal_moment});
  csv.row({dt / 2, 4.0 * sc.mc.paths, fine.ratio.value, fine.ratio.ci, fine.sup_moment,
           fine.terminal_moment});
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Obstacle problem solver and verification harness", "obstacle"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--scenario", g.scenario, "Scenario file");
  app.add_option("--out", g.out_dir, "Output directory (default: tables on stdout)");
  app.add_option("--seed", g.seed, "Override the Monte Carlo seed")->check(CLI::NonNegativeNumber);
  app.add_option("--threads", g.threads, "Worker threads; never changes results");

  std::string method = "psor";
  double penalty = 1024.0;
  auto* solve = app.add_subcommand("solve", "Solve the obstacle problem on the grid");
  solve->add_option("--method", method)->check(CLI::IsMember({"psor", "penalized"}));
  solve->add_option("--penalty", penalty)->check(CLI::PositiveNumber);

  std::string study;
  double shift = 0.05;
  auto* st = app.add_subcommand("study", "Convergence and stability studies");
  st->add_option("--study", study)
      ->required()
      ->check(CLI::IsMember({"penalization", "picard", "stability", "energy", "calibration"}));
  st->add_option("--shift", shift, "Obstacle decrease for the stability study")->check(CLI::PositiveNumber);

  std::string checks = "all";
  auto* vf = app.add_subcommand("verify", "Run verification checks");
  vf->add_option("--checks", checks, "all or a comma-separated list");

  std::string scheme = "reflected-mc";
  double s = 0.0, x = 0.0;
  bool has_s = false, has_x = false;
  bool density = false;
  auto* sim = app.add_subcommand("simulate", "Estimate Y0 of the reflected backward equation");
  sim->add_option("--scheme", scheme)->check(CLI::IsMember({"chain-dp", "penalized-mc", "reflected-mc"}));
  sim->add_option("--penalty", penalty)->check(CLI::PositiveNumber);
  sim->add_flag("--density", density, "Also write the transition density from (s, x)");

  auto* stop = app.add_subcommand("stop-value", "First-contact stopping rule against the Snell envelope");

  double p_exp = 4.0;
  auto* mom = app.add_subcommand("moments", "Moment ratio E sup|X|^p / E|X_T|^p and its refinement");
  mom->add_option("--p", p_exp)->check(CLI::Range(4.0, 64.0));

  for (auto* sub : {sim, stop, mom}) {
    sub->add_option("--s", s, "Start time")->each([&](const std::string&) { has_s = true; });
    sub->add_option("--x", x, "Start point")->each([&](const std::string&) { has_x = true; });
  }
  for (auto* sub : app.get_subcommands([](CLI::App*) { return true; })) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    if (code != 0) {
      err << "error: code=UsageError message=" << e.what() << '\n';
      return 2;
    }
    return 0;
  }

  try {
    Context ctx = load(g, out);
    if (!has_s) s = ctx.sc.mc.s;
    if (!has_x) x = ctx.sc.mc.x;
    if (*solve) return cmd_solve(ctx, method, penalty);
    if (*st) return cmd_study(ctx, study, shift);
    if (*vf) return cmd_verify(ctx, checks);
    if (*sim) return cmd_simulate(ctx, scheme, s, x, penalty, density);
    if (*stop) return cmd_stop_value(ctx, s, x);
    return cmd_moments(ctx, p_exp, s, x);
  } catch (const Error& e) {
    err << "error: code=" << to_string(e.code()) << " message=" << e.what() << '\n';
    return is_validation_error(e.code()) ? 2 : 3;
  } catch (const std::exception& e) {
    err << "error: code=Internal message=" << e.what() << '\n';
    return 3;
  }
}

}  // namespace obstacle
