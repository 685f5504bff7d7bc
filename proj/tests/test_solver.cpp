#include <gtest/gtest.h>

#include <random>

#include "obstacle/errors.hpp"
#include "obstacle/scenario.hpp"
#include "obstacle/solver.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace obstacle;

TEST(Lcp, PsorMatchesActiveSetEnumeration) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 4 + trial % 9;  // up to 12
    Tridiagonal<double> M(n);
    for (int i = 0; i < n; ++i) {
      M.lower(i) = -0.5 - 0.4 * std::abs(U(rng));
      M.upper(i) = -0.5 - 0.4 * std::abs(U(rng));
      M.diag(i) = 2.0 + std::abs(U(rng));
    }
    Eigen::VectorXd b(n), l(n);
    for (int i = 0; i < n; ++i) {
      b(i) = U(rng);
      l(i) = 0.5 * U(rng);
    }
    Eigen::VectorXd x = l;
    LcpOptions opts;
    opts.tol = 1e-13;
    const LcpResult res = solve_lcp_psor(M, b, l, x, opts);
    EXPECT_LE(res.residual, 1e-13);
    const Eigen::VectorXd ref = oracle::brute_force_lcp(M.dense(), b, l);
    ASSERT_FALSE(std::isnan(ref(0)));
    EXPECT_LT((x - ref).cwiseAbs().maxCoeff(), 1e-11) << "trial " << trial;
  }
}

TEST(Solver, ConstantScenarioIsConstant) {
  const Scenario sc = testing_util::scenario("constant");
  const SpaceTimeGrid grid = SpaceTimeGrid::make(sc.problem, sc.nx, sc.nt);
  const ObstacleSolution sol = solve_psor(sc.problem, grid, sc.tolerances);
  EXPECT_LT((sol.u.array() - 1.0).abs().maxCoeff(), 1e-12);
  EXPECT_LT(sol.r.cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Solver, ParabolaStaysOnObstacleWithUnitDensity) {
  const Scenario sc = testing_util::scenario("parabola");
  const SpaceTimeGrid grid = SpaceTimeGrid::make(sc.problem, 60, 20);
  const ObstacleSolution sol = solve_psor(sc.problem, grid, sc.tolerances);
  const Field h = obstacle_field(sc.problem, grid);
  EXPECT_LT((sol.u - h).cwiseAbs().maxCoeff(), 1e-10);
  for (int k = 0; k < grid.nt; ++k) {
    for (int i = 1; i <= grid.nx; ++i) EXPECT_NEAR(sol.r(k, i), 1.0, 1e-8);
  }
}

TEST(Solver, InactiveObstacleGivesHeatFlow) {
  const Scenario sc = testing_util::scenario("heat");
  const SpaceTimeGrid grid = SpaceTimeGrid::make(sc.problem, 400, 400);
  const ObstacleSolution sol = solve_psor(sc.problem, grid, sc.tolerances);
  double err = 0.0;
  for (int i = 1; i <= grid.nx; ++i) {
    err = std::max(err, std::abs(sol.u(0, i) - oracle::heat_gaussian(grid.x(i), 1.0, 1.0)));
  }
  EXPECT_LT(err, 5e-3);
  EXPECT_LT(sol.r.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Solver, PenalizedLevelsIncreaseTowardPsor) {
  const Scenario sc = testing_util::scenario("american_put");
  const SpaceTimeGrid grid = SpaceTimeGrid::make(sc.problem, 81, 60);
  const PenalizationStudy st = penalization_study(sc.problem, grid, power_schedule(4, 14), sc.tolerances);
  EXPECT_LE(st.worst_decrease, 1e-8);
  for (std::size_t j = 1; j < st.levels.size(); ++j) {
    EXPECT_LE(st.levels[j].distance_to_psor, st.levels[j - 1].distance_to_psor + 1e-12);
  }
  EXPECT_LE(st.levels.back().distance_to_psor, 1e-3);
}

TEST(Solver, SkorokhodConditionHolds) {
  for (const char* name : {"american_put", "sine_coef", "parabola"}) {
    const Scenario sc = testing_util::scenario(name);
    const SpaceTimeGrid grid = SpaceTimeGrid::make(sc.problem, 80, 40);
    const ObstacleSolution sol = solve_psor(sc.problem, grid, sc.tolerances);
    EXPECT_LE(skorokhod_ratio(sol, obstacle_field(sc.problem, grid)), 1e-8) << name;
  }
}

TEST(Solver, PicardContractsOnPut) {
  const Scenario sc = testing_util::scenario("american_put");
  const SpaceTimeGrid grid = SpaceTimeGrid::make(sc.problem, 81, 60);
  const PicardResult res = picard_outer(sc.problem, grid, InnerMethod::Psor, sc.tolerances);
  EXPECT_TRUE(res.trace.converged);
  for (std::size_t j = 1; j < res.trace.ratios.size(); ++j) EXPECT_LE(res.trace.ratios[j], 0.6);
  const ObstacleSolution direct = solve_psor(sc.problem, grid, sc.tolerances);
  EXPECT_LT((res.solution.u - direct.u).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Solver, PicardGammaFormula) {
  EXPECT_DOUBLE_EQ(picard_gamma(0.0, 1.0, 1.0), 1.5);
  EXPECT_DOUBLE_EQ(picard_gamma(1.0, 1.0, 1.0), 1.0 + 4.0 + 8.0 + 0.5);
}

TEST(Solver, ObstacleStabilityIsLipschitz) {
  const Scenario sc = testing_util::scenario("sine_coef");
  const SpaceTimeGrid grid = SpaceTimeGrid::make(sc.problem, 80, 40);
  const SpaceTimeFn h1 = sc.problem.obstacle.h;
  const SpaceTimeFn h2 = [h1](double t, double x) { return h1(t, x) - 0.05; };
  const StabilityReport rep = obstacle_stability(sc.problem, grid, h1, h2, sc.tolerances);
  EXPECT_TRUE(rep.passed);
  EXPECT_LE(rep.solution_distance, rep.obstacle_distance + 1e-12);
}

TEST(Solver, ReplacingObstacleByMaxWithFreeSolutionChangesNothing) {
  const Scenario sc = testing_util::scenario("sine_coef");
  const SpaceTimeGrid grid = SpaceTimeGrid::make(sc.problem, 80, 40);
  EXPECT_LT(obstacle_replacement_check(sc.problem, grid, sc.tolerances), 1e-8);
}

TEST(Energy, ResidualDecaysLinearlyInTime) {
  const Scenario sc = testing_util::scenario("american_put");
  const EnergyRate er = energy_rate_study(sc.problem, 81, {50, 100, 200}, sc.tolerances);
  EXPECT_GE(er.rate, 0.9);
}

TEST(Apriori, RatioIsFinite) {
  const Scenario sc = testing_util::scenario("american_put");
  const SpaceTimeGrid grid = SpaceTimeGrid::make(sc.problem, 81, 40);
  const ObstacleSolution sol = solve_psor(sc.problem, grid, sc.tolerances);
  const AprioriReport rep = apriori_norm_report(sc.problem, grid, sol, sol.u);
  EXPECT_TRUE(std::isfinite(rep.ratio));
  EXPECT_GT(rep.left, 0.0);
}
