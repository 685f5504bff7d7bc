#include <cctype>
#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "obstacle/cli.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "obstacle");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = obstacle::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("obstacle_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<double>> numeric_rows(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || std::isalpha(static_cast<unsigned char>(line[0])) || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST(Cli, SolveConstantWritesConstantField) {
  const fs::path dir = temp_dir("constant");
  const CliRun r = cli({"--scenario", testing_util::scenario_path("constant"), "--out", dir.string(),
                     "solve", "--method", "psor"});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = read(dir / "solution.csv");
  EXPECT_EQ(csv.rfind("# scenario=constant", 0), 0u);
  EXPECT_NE(csv.find("seed=1"), std::string::npos);
  EXPECT_NE(csv.find("# units:"), std::string::npos);
  for (const auto& row : numeric_rows(csv)) EXPECT_NEAR(row[2], 1.0, 1e-12);
  EXPECT_TRUE(fs::exists(dir / "diagnostics.csv"));
}

TEST(Cli, MissingScenarioFileExitsTwo) {
  const CliRun r = cli({"--scenario", "/nonexistent.cfg", "solve"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("error: code=ConfigError", 0), 0u) << r.err;
}

TEST(Cli, UnknownStudyAndMissingSubcommandExitTwo) {
  EXPECT_EQ(cli({"--scenario", testing_util::scenario_path("constant"), "study", "--study", "nope"}).code, 2);
  EXPECT_EQ(cli({"--scenario", testing_util::scenario_path("constant")}).code, 2);
  EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST(Cli, PenalizationStudyOnConstantIsASingleZeroRow) {
  const CliRun r = cli({"--scenario", testing_util::scenario_path("constant"), "study", "--study",
                     "penalization"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = numeric_rows(r.out);
  ASSERT_EQ(rows.size(), 1u);
  for (std::size_t j = 1; j < rows[0].size(); ++j) EXPECT_LT(std::abs(rows[0][j]), 1e-12);
}

TEST(Cli, VerifyAllOnConstantPasses) {
  const fs::path dir = temp_dir("verify_constant");
  const CliRun r = cli({"--scenario", testing_util::scenario_path("constant"), "--out", dir.string(),
                     "verify", "--checks", "all"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "verify.csv"));
}

TEST(Cli, ExceededBudgetExitsOneAndNamesTheCheck) {
  const fs::path dir = temp_dir("tight");
  std::string text = read(testing_util::scenario_path("sine_coef"));
  text += "verify.agreement_tol = 1e-12\n";
  std::ofstream(dir / "tight.cfg") << text;
  const CliRun r = cli({"--scenario", (dir / "tight.cfg").string(), "--out", dir.string(), "verify",
                     "--checks", "skorokhod,minimality"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("FAIL minimality"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("PASS skorokhod"), std::string::npos) << r.out;
}

TEST(Cli, UnknownCheckIsAValidationError) {
  const CliRun r = cli({"--scenario", testing_util::scenario_path("constant"), "verify", "--checks", "bogus"});
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, PenalizedPutMatchesGoldenFile) {
  const CliRun r = cli({"--scenario", testing_util::scenario_path("american_put"), "solve", "--method",
                     "penalized", "--penalty", "1024"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = numeric_rows(r.out);
  const auto golden =
      numeric_rows(read(std::string(OBSTACLE_SOURCE_DIR) + "/tests/golden/american_put_penalized_1024.csv"));
  ASSERT_FALSE(golden.empty());
  // the golden file keeps every 101st row of the solution table
  std::size_t g = 0;
  for (std::size_t i = 0; i < rows.size(); i += 101, ++g) {
    ASSERT_LT(g, golden.size());
    ASSERT_EQ(rows[i].size(), golden[g].size());
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      EXPECT_NEAR(rows[i][j], golden[g][j], 1e-10 * (1.0 + std::abs(golden[g][j]))) << "row " << i;
    }
  }
  EXPECT_EQ(g, golden.size());
}
