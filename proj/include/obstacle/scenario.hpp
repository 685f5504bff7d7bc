#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "obstacle/problem.hpp"
#include "obstacle/solver.hpp"

namespace obstacle {

/// Flat `section.key = value` configuration. Lines starting with '#' are
/// comments. Every key must be consumed by the loader; leftovers are reported
/// as ConfigError so typos never pass silently.
class Config {
 public:
  static Config parse(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string text(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key, double fallback) const;
  long integer(const std::string& key, long fallback) const;
  std::string require_text(const std::string& key) const;
  /// Keys that were never read.
  std::vector<std::string> unused() const;

 private:
  std::map<std::string, std::string> values_;
  mutable std::map<std::string, bool> used_;
};

struct MonteCarloConfig {
  long paths = 100000;
  double dt_path = 0.0;  // 0 selects the grid step
  std::uint64_t seed = 1;
  int degree = 3;
  std::vector<std::pair<double, double>> probes;  // (s, x)
  double s = 0.0;  // start used by single-start checks
  double x = 0.0;
};

/// Acceptance thresholds of the verification checks.
struct VerifySettings {
  double chain_tol = 1e-3;
  double measure_tol = 5e-2;
  double agreement_tol = 1e-3;
  double skorokhod_tol = 1e-8;
  double refinement_tol = 0.2;
  double mass_tol = 1e-3;
  int penalty_first = 4;
  int penalty_last = 14;
  std::string measure_source = "chain";  // chain | reflected-mc
};

/// Frozen bias constants, budget = 3 CI + c (dt + dx^2).
struct Calibration {
  double c_bias_u = 0.0;
  double c_bias_z = 0.0;
  double c_bias_k = 0.0;
  double c_bias_residual = 0.0;
};

struct Scenario {
  std::string name;
  std::string family;
  std::string hash;  // FNV-1a of the file contents
  ObstacleProblem problem;
  int nx = 200;
  int nt = 200;
  MonteCarloConfig mc;
  SolverOptions tolerances;
  VerifySettings verify;
  Calibration calibration;
};

Scenario parse_scenario(const std::string& text);
/// Throws ConfigError when the file cannot be read.
Scenario load_scenario(const std::string& path);

/// Builtin problem families, parameterized by the `problem.*`, `obstacle.*`,
/// `terminal.*` and `driver.*` keys.
ObstacleProblem build_family(const std::string& family, const Config& config);

}  // namespace obstacle
