#include <gtest/gtest.h>

#include "obstacle/errors.hpp"
#include "obstacle/problem.hpp"
#include "obstacle/scenario.hpp"
#include "test_util.hpp"

using namespace obstacle;

TEST(Problem, ShippedScenariosSatisfyHypotheses) {
  for (const char* name : {"constant", "heat", "american_put", "parabola", "sine_coef"}) {
    const Scenario sc = testing_util::scenario(name);
    const HypothesisReport rep = validate_hypotheses(sc.problem, 2048, 7);
    EXPECT_TRUE(rep.passed()) << name;
  }
}

TEST(Problem, TerminalBelowObstacleIsReported) {
  const Scenario sc = parse_scenario(
      "scenario.name = bad\nproblem.family = custom-polynomial\nobstacle.c0 = 1\nterminal.c0 = 0\n");
  const HypothesisReport rep = validate_hypotheses(sc.problem, 512, 1);
  EXPECT_FALSE(rep.passed());
  EXPECT_FALSE(rep.find("terminal-above-obstacle").passed);
}

TEST(Problem, LipschitzProbeRecoversLinearDriverConstant) {
  const Scenario sc = testing_util::scenario("american_put");
  const double L = lipschitz_probe(sc.problem.driver, 4096, 3, {0, 1, -3, 3, 10});
  EXPECT_LE(L, sc.problem.driver.lipschitz * (1 + 1e-9));
  EXPECT_GE(L, 0.5 * sc.problem.driver.lipschitz);
}

TEST(Problem, WeightIsOneWithoutDecay) {
  Weight w;
  EXPECT_DOUBLE_EQ(w(3.0), 1.0);
  w.alpha = 2.0;
  EXPECT_LT(w(3.0), 1.0);
  EXPECT_DOUBLE_EQ(w(3.0), w(-3.0));
}

TEST(Config, UnknownKeyIsAnError) {
  try {
    parse_scenario("scenario.name = x\nproblem.family = constant\ngrid.nxx = 3\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigError);
  }
}

TEST(Config, DuplicateAndMalformedLines) {
  EXPECT_THROW(parse_scenario("scenario.name = a\nscenario.name = b\n"), Error);
  EXPECT_THROW(parse_scenario("scenario.name\n"), Error);
  EXPECT_THROW(load_scenario("/nonexistent/file.cfg"), Error);
}

TEST(Config, ProbesAndOverrides) {
  const Scenario sc = parse_scenario(
      "scenario.name = p\nproblem.family = constant\nmc.probes = 0:0, 0.5:-1\n"
      "tolerances.omega = 1.2\ncalibration.c_bias_u = 2.5\n");
  ASSERT_EQ(sc.mc.probes.size(), 2u);
  EXPECT_DOUBLE_EQ(sc.mc.probes[1].second, -1.0);
  EXPECT_DOUBLE_EQ(sc.tolerances.omega, 1.2);
  EXPECT_DOUBLE_EQ(sc.calibration.c_bias_u, 2.5);
}
