#include <vector>
#include <gtest/gtest.h>

#include <cmath>

#include "obstacle/errors.hpp"
#include "obstacle/grid.hpp"
#include "obstacle/tridiagonal.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace obstacle;

TEST(Tridiagonal, SolveMatchesDenseInverse) {
  const int n = 9;
  Tridiagonal<double> t(n);
  for (int i = 0; i < n; ++i) {
    t.diag(i) = 3.0 + 0.1 * i;
    t.lower(i) = -1.0 - 0.05 * i;
    t.upper(i) = -0.7;
  }
  const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(n, -1.0, 2.0);
  const Eigen::VectorXd x = t.solve(b);
  const Eigen::VectorXd ref = t.dense().partialPivLu().solve(b);
  EXPECT_LT((x - ref).cwiseAbs().maxCoeff(), 1e-13);
  const Eigen::VectorXd xt = t.solve_transposed(b);
  const Eigen::VectorXd ref_t = t.dense().transpose().partialPivLu().solve(b);
  EXPECT_LT((xt - ref_t).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Kernel, ImplicitKernelIsStochasticAndMatchesDenseInverse) {
  const Scenario sc = testing_util::scenario("sine_coef");
  const SpaceTimeGrid grid = SpaceTimeGrid::make(sc.problem, 10, 8);
  const TransitionKernel P = transition_kernel(sc.problem, grid, 3);
  const Eigen::MatrixXd D = P.dense();
  for (int i = 0; i < grid.nodes(); ++i) {
    EXPECT_NEAR(D.row(i).sum(), 1.0, 1e-13);
    EXPECT_GE(D.row(i).minCoeff(), -1e-15);
  }
  // dense inverse of the full implicit matrix with absorbing boundary rows
  Eigen::MatrixXd A(grid.nodes(), grid.nodes());
  for (int j = 0; j < grid.nodes(); ++j) A.col(j) = P.op().apply_full(Eigen::VectorXd::Unit(grid.nodes(), j));
  Eigen::MatrixXd Mfull = Eigen::MatrixXd::Identity(grid.nodes(), grid.nodes()) - grid.dt * A;
  const Eigen::MatrixXd ref = Mfull.inverse();
  EXPECT_LT((D - ref).cwiseAbs().maxCoeff(), 1e-12);

  const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(grid.nodes(), 0.0, 1.0).array().sin();
  EXPECT_LT((P.expect(v) - D * v).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LT((P.propagate(v) - D.transpose() * v).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Kernel, ExplicitSchemeEnforcesCfl) {
  const Scenario sc = testing_util::scenario("heat");
  const SpaceTimeGrid coarse_t = SpaceTimeGrid::make(sc.problem, 200, 4);
  try {
    transition_kernel(sc.problem, coarse_t, 0, KernelScheme::Explicit);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CflViolation);
  }
  const SpaceTimeGrid fine_t = SpaceTimeGrid::make(sc.problem, 20, 400);
  const TransitionKernel P = transition_kernel(sc.problem, fine_t, 0, KernelScheme::Explicit);
  const Eigen::MatrixXd D = P.dense();
  EXPECT_GE(D.minCoeff(), 0.0);
}

TEST(Density, HeatKernelMatchesGaussian) {
  const Scenario sc = testing_util::scenario("heat");
  const SpaceTimeGrid grid = SpaceTimeGrid::make(sc.problem, 400, 400);
  const DensityTable d = solve_density(sc.problem, grid, 0, nearest_node(grid, 0.0));
  EXPECT_GT(d.min_mass(), 1.0 - 1e-6);
  for (int k : {100, 200, 400}) {
    const double x0 = grid.x(nearest_node(grid, 0.0));
    EXPECT_LT(gaussian_l1_distance(d, grid, k, x0, grid.t(k)), 2e-2) << k;
  }
}

TEST(Density, AronsonEnvelopeForUnitDiffusion) {
  // The implicit kernel has heavier tails than the Gaussian, so the fitted
  // constants reach 1 only under refinement.
  const Scenario sc = testing_util::scenario("heat");
  std::vector<EnvelopeFit> fits;
  for (int n : {400, 800}) {
    const SpaceTimeGrid grid = SpaceTimeGrid::make(sc.problem, n, n);
    const DensityTable d = solve_density(sc.problem, grid, 0, nearest_node(grid, 0.0));
    fits.push_back(aronson_envelope_check(d, grid));
    EXPECT_TRUE(fits.back().passed()) << n;
  }
  EXPECT_GT((fits[0].C_high - 1.0) / (fits[1].C_high - 1.0), 1.6);
  EXPECT_GT((fits[0].c_low - 1.0) / (fits[1].c_low - 1.0), 1.6);
  EXPECT_NEAR(fits[1].c_low, 1.0, 5e-2);
  EXPECT_NEAR(fits[1].C_high, 1.0, 5e-2);
}

TEST(Density, StartAtHorizonIsRejected) {
  const Scenario sc = testing_util::scenario("heat");
  const SpaceTimeGrid grid = SpaceTimeGrid::make(sc.problem, 40, 40);
  EXPECT_THROW(solve_density(sc.problem, grid, grid.nt, 10), Error);
}

TEST(Grid, InterpolationAndGradient) {
  const Scenario sc = testing_util::scenario("parabola");
  const SpaceTimeGrid grid = SpaceTimeGrid::make(sc.problem, 121, 10);
  const Field h = grid.sample([](double, double x) { return 1.0 - x * x; });
  EXPECT_NEAR(interpolate(h, grid, 0, 0.0), 1.0, 1e-12);
  const Eigen::VectorXd g = scaled_gradient(sc.problem, grid, 0, h.row(0).transpose());
  const int i = nearest_node(grid, 1.0);
  EXPECT_NEAR(g(i), -2.0 * grid.x(i), 1e-10);
}
