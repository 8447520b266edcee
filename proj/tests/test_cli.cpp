#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "safefilter/io.hpp"

namespace {

namespace fs = std::filesystem;
using safefilter::cli::kOk;
using safefilter::cli::kSafetyFailure;
using safefilter::cli::kUsage;

const fs::path kScenarios{SAFEFILTER_SCENARIO_DIR};

class Cli : public ::testing::Test
{
protected:
  void SetUp() override
  {
    const auto * info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("safefilter_cli_" + std::string(info->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }

  void TearDown() override { fs::remove_all(dir_); }

  int invoke(std::vector<std::string> args)
  {
    args.insert(args.begin(), "safefilter");
    std::vector<const char *> argv;
    for (const auto & a : args) {
      argv.push_back(a.c_str());
    }
    out_.str("");
    err_.str("");
    return safefilter::cli::main(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  std::string scenario(const std::string & name) const { return (kScenarios / name).string(); }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(Cli, RunWritesArtifacts)
{
  EXPECT_EQ(invoke({"run", scenario("example1.toml"), "--controller", "cbf", "--set", "alpha=1",
                    "--out", dir_.string()}),
            kOk);
  EXPECT_TRUE(fs::exists(dir_ / "example1.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "example1.svg"));
  EXPECT_NE(out_.str().find("reached"), std::string::npos) << out_.str();
  std::ifstream csv(dir_ / "example1.csv");
  const auto rows = safefilter::read_csv(csv);
  EXPECT_GT(rows.size(), 10u);
}

TEST_F(Cli, RunReportsApfOutcome)
{
  EXPECT_EQ(invoke({"run", scenario("example1.toml"), "--controller", "apf", "--set", "rho0=0.5",
                    "--out", dir_.string()}),
            kOk);
  EXPECT_TRUE(fs::exists(dir_ / "example1.csv"));
}

TEST_F(Cli, CollisionExitsOne)
{
  EXPECT_EQ(invoke({"run", scenario("example1_double_integrator.toml"), "--set", "alpha=2", "--out",
                    dir_.string()}),
            kSafetyFailure);
}

TEST_F(Cli, MissingFileIsUsageError)
{
  EXPECT_EQ(invoke({"run", (dir_ / "nope.toml").string(), "--out", (dir_ / "o").string()}), kUsage);
  EXPECT_FALSE(fs::exists(dir_ / "o"));
  EXPECT_FALSE(err_.str().empty());
}

TEST_F(Cli, BadArgumentsAreUsageErrors)
{
  EXPECT_EQ(invoke({}), kUsage);
  EXPECT_EQ(invoke({"run"}), kUsage);
  EXPECT_EQ(invoke({"run", scenario("example1.toml"), "--set", "bogus=1", "--out", dir_.string()}),
            kUsage);
  EXPECT_EQ(invoke({"run", scenario("example1.toml"), "--controller", "pid"}), kUsage);
  EXPECT_EQ(invoke({"--help"}), kOk);
}

TEST_F(Cli, SweepAlphaOnDoubleIntegrator)
{
  EXPECT_EQ(invoke({"sweep", scenario("example1_double_integrator.toml"), "--param", "alpha",
                    "--values", "0.5,1", "--out", dir_.string()}),
            kOk);
  const fs::path table = dir_ / "example1_double_integrator_sweep_alpha.csv";
  ASSERT_TRUE(fs::exists(table));
  EXPECT_TRUE(fs::exists(dir_ / "example1_double_integrator_sweep_alpha.svg"));
  std::ifstream in(table);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    ++lines;
  }
  EXPECT_EQ(lines, 3);
}

TEST_F(Cli, SweepRho0GivesFourReports)
{
  EXPECT_EQ(invoke({"sweep", scenario("example1.toml"), "--controller", "apf", "--param", "rho0",
                    "--values", "1", "0.5", "0.25", "0.1", "--out", dir_.string()}),
            kOk);
  std::ifstream in(dir_ / "example1_sweep_rho0.csv");
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    ++lines;
  }
  EXPECT_EQ(lines, 5);
}

TEST_F(Cli, SweepUsageErrors)
{
  EXPECT_EQ(invoke({"sweep", scenario("example1.toml"), "--param", "gamma", "--values", "1", "--out",
                    dir_.string()}),
            kUsage);
  EXPECT_EQ(invoke({"sweep", scenario("example1.toml"), "--param", "alpha", "--values", ",", "--out",
                    dir_.string()}),
            kUsage);
}

TEST_F(Cli, CompareWall)
{
  EXPECT_EQ(invoke({"compare", scenario("scenario5_wall.toml"), "--out", dir_.string()}), kOk);
  EXPECT_TRUE(fs::exists(dir_ / "scenario5_wall_compare.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "scenario5_wall_compare.svg"));
  EXPECT_TRUE(fs::exists(dir_ / "scenario5_wall_apf-gaussian.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "scenario5_wall_cbf.csv"));
  EXPECT_NE(out_.str().find("oscillation_index"), std::string::npos);
}

TEST_F(Cli, CompareOffsetPairBothReach)
{
  EXPECT_EQ(invoke({"compare", scenario("scenario1_offset_pair.toml"), "--out", dir_.string()}), kOk);
  EXPECT_NE(out_.str().find("terminals: reached_goal / reached_goal"), std::string::npos)
    << out_.str();
}

TEST_F(Cli, CompareEmptySceneIdentical)
{
  auto spec = safefilter::example_scenario(safefilter::ControllerKind::cbf);
  spec.name = "empty";
  spec.scene.obstacles.clear();
  const fs::path file = dir_ / "empty.toml";
  std::ofstream(file) << safefilter::to_toml(spec);
  EXPECT_EQ(invoke({"compare", file.string(), "--out", dir_.string()}), kOk);
  std::ifstream a(dir_ / "empty_apf.csv");
  std::ifstream c(dir_ / "empty_cbf.csv");
  const auto ra = safefilter::read_csv(a);
  const auto rc = safefilter::read_csv(c);
  ASSERT_EQ(ra.size(), rc.size());
  for (std::size_t k = 0; k < ra.size(); ++k) {
    EXPECT_EQ(ra[k].position, rc[k].position);
    EXPECT_FALSE(ra[k].intervened);
    EXPECT_FALSE(rc[k].intervened);
  }
}

TEST_F(Cli, ListsScenarios)
{
  EXPECT_EQ(invoke({"scenarios", "--dir", kScenarios.string()}), kOk);
  const std::string text = out_.str();
  EXPECT_NE(text.find("scenario4_doorway_0p7m"), std::string::npos);
  const auto spec = safefilter::load_scenario(kScenarios / "example1.toml");
  EXPECT_NE(text.find(safefilter::content_hash(spec)), std::string::npos);
}

TEST_F(Cli, ExecuteAllKeepsOrder)
{
  std::vector<safefilter::ScenarioSpec> specs;
  for (double a : {0.5, 1.0, 2.0, 5.0}) {
    auto s = safefilter::example_scenario(safefilter::ControllerKind::cbf);
    s.cfg.alpha_gain = a;
    specs.push_back(s);
  }
  const auto reports = safefilter::cli::execute_all(specs, 3);
  ASSERT_EQ(reports.size(), 4u);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    EXPECT_EQ(reports[i].spec.cfg.alpha_gain, specs[i].cfg.alpha_gain);
    EXPECT_EQ(reports[i].hash, safefilter::content_hash(specs[i]));
    const auto solo = safefilter::cli::execute(specs[i]);
    EXPECT_EQ(solo.log.rows.size(), reports[i].log.rows.size());
  }
}

TEST(CliEnv, OutDirFromEnvironment)
{
  ::setenv("SAFEFILTER_OUT", "/tmp/sf_env_out", 1);
  EXPECT_EQ(safefilter::cli::default_out_dir(), fs::path("/tmp/sf_env_out"));
  ::unsetenv("SAFEFILTER_OUT");
  EXPECT_EQ(safefilter::cli::default_out_dir(), fs::path("out"));
}

}  // namespace
