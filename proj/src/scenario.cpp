#include "obstacle/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "obstacle/csv.hpp"
#include "obstacle/errors.hpp"

namespace obstacle {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void config_error(const std::string& message) {
  throw Error(ErrorCode::ConfigError, message);
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config c;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      config_error("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) config_error("line " + std::to_string(line_no) + ": empty key");
    if (c.values_.count(key)) config_error("line " + std::to_string(line_no) + ": duplicate key " + key);
    c.values_[key] = value;
  }
  return c;
}

std::string Config::text(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  used_[key] = true;
  return it->second;
}

std::string Config::require_text(const std::string& key) const {
  if (!has(key)) config_error("missing required key " + key);
  return text(key, "");
}

double Config::number(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  const std::string v = text(key, "");
  std::size_t pos = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &pos);
  } catch (const std::exception&) {
    config_error("key " + key + ": not a number: " + v);
  }
  if (pos != v.size() || !std::isfinite(d)) config_error("key " + key + ": not a finite number: " + v);
  return d;
}

long Config::integer(const std::string& key, long fallback) const {
  if (!has(key)) return fallback;
  const std::string v = text(key, "");
  std::size_t pos = 0;
  long n = 0;
  try {
    n = std::stol(v, &pos);
  } catch (const std::exception&) {
    config_error("key " + key + ": not an integer: " + v);
  }
  if (pos != v.size()) config_error("key " + key + ": not an integer: " + v);
  return n;
}

std::vector<std::string> Config::unused() const {
  std::vector<std::string> out;
  for (const auto& [key, value] : values_) {
    if (!used_.count(key)) out.push_back(key);
  }
  return out;
}

namespace {

constexpr double kInactive = 0.0;

struct Gaussian {
  double shift, height, width;
  double operator()(double x) const {
    return shift + height * std::exp(-x * x / (2.0 * width * width));
  }
};

struct Quadratic {
  double c0, c1, c2;
  double operator()(double x) const { return c0 + x * (c1 + x * c2); }
};

Driver linear_driver(double rate, double kappa, double source) {
  Driver d;
  d.f = [rate, kappa, source](double, double, double y, double z) {
    return source - rate * y + kappa * z;
  };
  d.lipschitz = std::max(std::abs(rate), std::abs(kappa));
  d.growth = d.lipschitz;
  const double g = std::abs(source);
  d.g = [g](double, double) { return g; };
  return d;
}

void constant_coefficient(Coefficients& c, double a) {
  c.a = [a](double, double) { return a; };
  c.a_x = [](double, double) { return 0.0; };
  c.lambda = a;
  c.Lambda = a;
}

}  // namespace

ObstacleProblem build_family(const std::string& family, const Config& cfg) {
  ObstacleProblem p;
  p.horizon = cfg.number("problem.horizon", 1.0);
  p.truncation.x_lo = cfg.number("problem.x_lo", -1.0);
  p.truncation.x_hi = cfg.number("problem.x_hi", 1.0);
  const std::string boundary = cfg.text("problem.boundary", "clamp");
  if (boundary == "clamp") {
    p.truncation.mode = BoundaryMode::ClampToData;
  } else if (boundary == "reflecting") {
    p.truncation.mode = BoundaryMode::Reflecting;
  } else {
    config_error("problem.boundary must be clamp or reflecting");
  }
  p.weight.alpha = cfg.number("problem.alpha", 0.0);

  if (family == "constant") {
    const double c = cfg.number("problem.value", 1.0);
    constant_coefficient(p.coefficients, cfg.number("problem.a", 1.0));
    p.driver = linear_driver(0.0, 0.0, kInactive);
    p.obstacle.h = [c](double, double) { return c; };
    p.obstacle.phi = [c](double) { return c; };
    p.obstacle.growth_c = std::abs(c);
  } else if (family == "sine-coef") {
    const double a0 = cfg.number("problem.a0", 1.0);
    const double amp = cfg.number("problem.amplitude", 0.5);
    p.coefficients.a = [a0, amp](double t, double x) { return a0 + amp * std::sin(x) * std::exp(-t); };
    p.coefficients.a_x = [amp](double t, double x) { return amp * std::cos(x) * std::exp(-t); };
    p.coefficients.lambda = a0 - std::abs(amp);
    p.coefficients.Lambda = a0 + std::abs(amp);
    p.driver = linear_driver(cfg.number("driver.rate", 0.0), 0.0, cfg.number("driver.source", 0.0));
    const Gaussian phi{cfg.number("terminal.shift", 0.0), cfg.number("terminal.height", 1.0),
                       cfg.number("terminal.width", 1.0)};
    const Gaussian h{cfg.number("obstacle.shift", 0.0), cfg.number("obstacle.height", 0.8),
                     cfg.number("obstacle.width", 1.0)};
    p.obstacle.h = [h](double, double x) { return h(x); };
    p.obstacle.phi = phi;
    p.obstacle.growth_c = std::abs(h.shift) + std::abs(h.height);
  } else if (family == "american-put") {
    const double strike = cfg.number("problem.strike", 1.0);
    const double rate = cfg.number("problem.rate", 0.05);
    const double variance = cfg.number("problem.variance", 0.1);
    if (!(variance > 0.0)) config_error("problem.variance must be positive");
    constant_coefficient(p.coefficients, variance);
    const double kappa = (rate - 0.5 * variance) / std::sqrt(variance);
    p.driver = linear_driver(rate, kappa, 0.0);
    auto payoff = [strike](double x) { return std::max(strike - std::exp(x), 0.0); };
    p.obstacle.h = [payoff](double, double x) { return payoff(x); };
    p.obstacle.phi = payoff;
    p.obstacle.growth_c = strike;
  } else if (family == "custom-polynomial") {
    constant_coefficient(p.coefficients, cfg.number("problem.a", 1.0));
    p.driver = linear_driver(cfg.number("driver.rate", 0.0), 0.0, cfg.number("driver.source", 0.0));
    const Quadratic h{cfg.number("obstacle.c0", 0.0), cfg.number("obstacle.c1", 0.0),
                      cfg.number("obstacle.c2", 0.0)};
    const Quadratic phi{cfg.number("terminal.c0", h.c0), cfg.number("terminal.c1", h.c1),
                        cfg.number("terminal.c2", h.c2)};
    p.obstacle.h = [h](double, double x) { return h(x); };
    p.obstacle.phi = phi;
    p.obstacle.growth_c = std::abs(h.c0) + std::abs(h.c1) + std::abs(h.c2);
    p.obstacle.growth_beta = 1.0;
  } else {
    config_error("unknown problem.family " + family);
  }
  p.check_invariants();
  return p;
}

namespace {

std::vector<std::pair<double, double>> parse_probes(const std::string& text) {
  std::vector<std::pair<double, double>> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) config_error("mc.probes entries must be s:x");
    try {
      out.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
    } catch (const std::exception&) {
      config_error("mc.probes: cannot parse " + item);
    }
  }
  return out;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  const Config cfg = Config::parse(text);
  Scenario sc;
  sc.hash = fnv1a_hex(text);
  sc.name = cfg.require_text("scenario.name");
  sc.family = cfg.require_text("problem.family");
  sc.problem = build_family(sc.family, cfg);
  sc.nx = static_cast<int>(cfg.integer("grid.nx", 200));
  sc.nt = static_cast<int>(cfg.integer("grid.nt", 200));
  if (sc.nx < 1 || sc.nt < 1) config_error("grid.nx and grid.nt must be positive");

  MonteCarloConfig& mc = sc.mc;
  mc.paths = cfg.integer("mc.paths", mc.paths);
  mc.dt_path = cfg.number("mc.dt", mc.dt_path);
  mc.seed = static_cast<std::uint64_t>(cfg.integer("mc.seed", 1));
  mc.degree = static_cast<int>(cfg.integer("mc.degree", mc.degree));
  mc.probes = parse_probes(cfg.text("mc.probes", ""));
  mc.s = cfg.number("mc.s", 0.0);
  mc.x = cfg.number("mc.x", 0.0);
  if (mc.probes.empty()) mc.probes.emplace_back(mc.s, mc.x);

  SolverOptions& o = sc.tolerances;
  o.contact_tol_rel = cfg.number("tolerances.contact_rel", o.contact_tol_rel);
  o.lcp_tol = cfg.number("tolerances.lcp", o.lcp_tol);
  o.inner_tol = cfg.number("tolerances.inner", o.inner_tol);
  o.mono_tol = cfg.number("tolerances.mono", o.mono_tol);
  o.omega = cfg.number("tolerances.omega", o.omega);
  o.max_inner = static_cast<int>(cfg.integer("tolerances.max_inner", o.max_inner));
  o.max_sweeps = static_cast<int>(cfg.integer("tolerances.max_sweeps", o.max_sweeps));
  o.stall_window = static_cast<int>(cfg.integer("tolerances.stall_window", o.stall_window));
  o.stability_C = cfg.number("tolerances.stability_c", o.stability_C);
  o.max_outer = static_cast<int>(cfg.integer("tolerances.max_outer", o.max_outer));
  o.outer_tol = cfg.number("tolerances.outer", o.outer_tol);
  if (!(o.omega > 0.0 && o.omega < 2.0)) config_error("tolerances.omega must lie in (0, 2)");

  VerifySettings& v = sc.verify;
  v.chain_tol = cfg.number("verify.chain_tol", v.chain_tol);
  v.measure_tol = cfg.number("verify.measure_tol", v.measure_tol);
  v.agreement_tol = cfg.number("verify.agreement_tol", v.agreement_tol);
  v.skorokhod_tol = cfg.number("verify.skorokhod_tol", v.skorokhod_tol);
  v.refinement_tol = cfg.number("verify.refinement_tol", v.refinement_tol);
  v.mass_tol = cfg.number("verify.mass_tol", v.mass_tol);
  v.penalty_first = static_cast<int>(cfg.integer("verify.penalty_first", v.penalty_first));
  v.penalty_last = static_cast<int>(cfg.integer("verify.penalty_last", v.penalty_last));
  v.measure_source = cfg.text("verify.measure_source", v.measure_source);
  if (v.measure_source != "chain" && v.measure_source != "reflected-mc") {
    config_error("verify.measure_source must be chain or reflected-mc");
  }

  Calibration& c = sc.calibration;
  c.c_bias_u = cfg.number("calibration.c_bias_u", c.c_bias_u);
  c.c_bias_z = cfg.number("calibration.c_bias_z", c.c_bias_z);
  c.c_bias_k = cfg.number("calibration.c_bias_k", c.c_bias_k);
  c.c_bias_residual = cfg.number("calibration.c_bias_residual", c.c_bias_residual);

  const auto leftover = cfg.unused();
  if (!leftover.empty()) config_error("unknown key " + leftover.front());
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) config_error("cannot read scenario file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

}  // namespace obstacle
