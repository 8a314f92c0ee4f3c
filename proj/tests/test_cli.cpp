#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "admissible/cli/commands.hpp"
#include "admissible/core/dataset_io.hpp"
#include "admissible/core/grid.hpp"

using namespace admissible;
using namespace admissible::cli;
namespace fs = std::filesystem;

namespace {

const char* kTinyMap = R"(# small and fast
seed = 3

[env]
name = "map2d"
beta = 0.1

[batch]
size = 40
horizon = 15

[expert]
trajectories = 80
horizon = 15
iterations = 10
gamma = 0.9
temperature = 1.0
n_trees = 10

[solver]
gamma = 0.9
iterations = 10
n_trees = 10
min_leaf = 5
policy_temperature = 1.0

[ope]
delta = 0.05

[polytope]
epsilon = 1.0
delta_cap = 1.0
grid_step = 0.5
)";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("admissible_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const std::string& extra = "", const std::string& base = kTinyMap) {
    const fs::path p = dir_ / "cfg.toml";
    std::ofstream(p) << base << extra;
    return p;
  }

  /// Runs the installed binary; returns its exit status.
  int run(const std::string& args) {
    const std::string cmd = std::string(ADMISSIBLE_CLI_PATH) + " " + args + " > " + (dir_ / "stdout.txt").string() +
                            " 2> " + (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  CommandOptions opts(const fs::path& out) {
    CommandOptions o;
    o.config = dir_ / "cfg.toml";
    o.out = out;
    return o;
  }

  fs::path dir_;
};

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST(ConfigFile, ParsesSectionsAndTypes) {
  const auto f = ConfigFile::parse("seed = 5 # trailing\n[a]\nx = 1.5\nname = \"hi # there\"\nflag = true\narr = [1, -2.5, 3]\n");
  EXPECT_EQ(f.get_u64("seed", 0), 5u);
  EXPECT_DOUBLE_EQ(f.get_double("a.x", 0.0), 1.5);
  EXPECT_EQ(f.get_string("a.name", ""), "hi # there");
  EXPECT_TRUE(f.get_bool("a.flag", false));
  EXPECT_EQ(f.get_array("a.arr", {}), (std::vector<double>{1.0, -2.5, 3.0}));
  EXPECT_DOUBLE_EQ(f.get_double("a.missing", 7.0), 7.0);
}

TEST(ConfigFile, MalformedLinesAreErrors) {
  EXPECT_THROW(ConfigFile::parse("[open\n"), ConfigError);
  EXPECT_THROW(ConfigFile::parse("novalue\n"), ConfigError);
  EXPECT_THROW(ConfigFile::parse("x = \"unterminated\n"), ConfigError);
  EXPECT_THROW(ConfigFile::parse("x = 1\nx = 2\n"), ConfigError);
}

TEST(ConfigFile, TypeMismatchIsError) {
  const auto f = ConfigFile::parse("x = \"text\"\n");
  EXPECT_THROW(f.get_double("x", 0.0), ConfigError);
}

TEST(ExperimentConfig, ReadsEverySection) {
  const auto c = ExperimentConfig::from_file(ConfigFile::parse(kTinyMap));
  EXPECT_EQ(c.seed, 3u);
  EXPECT_EQ(c.env_name, "map2d");
  EXPECT_EQ(c.batch_size, 40u);
  EXPECT_EQ(c.expert.trees.n_trees, 10);
  EXPECT_DOUBLE_EQ(c.policy_temperature, 1.0);
  EXPECT_DOUBLE_EQ(c.grid_step, 0.5);
}

TEST(ExperimentConfig, UnknownKeyIsRejected) {
  try {
    ExperimentConfig::from_file(ConfigFile::parse(std::string(kTinyMap) + "\n[solver2]\ngama = 0.9\n"));
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("solver2.gama"), std::string::npos);
  }
}

TEST(ExperimentConfig, SeedIsMandatory) {
  EXPECT_THROW(ExperimentConfig::from_file(ConfigFile::parse("[env]\nname = \"map2d\"\n")), ConfigError);
  const std::uint64_t s = 9;
  EXPECT_EQ(ExperimentConfig::from_file(ConfigFile::parse("[env]\nname = \"map2d\"\n"), &s).seed, 9u);
}

TEST(ExperimentConfig, UnknownEnvironmentIsRejected) {
  EXPECT_THROW(ExperimentConfig::from_file(ConfigFile::parse("seed = 1\n[env]\nname = \"pong\"\n")), ConfigError);
}

TEST(ParseWeights, AcceptsCommaLists) {
  EXPECT_EQ(parse_weights("0.5,0.5"), (Vec(2) << 0.5, 0.5).finished());
  EXPECT_EQ(parse_weights("[1, -2, 3]"), (Vec(3) << 1, -2, 3).finished());
  EXPECT_THROW(parse_weights(""), ConfigError);
  EXPECT_THROW(parse_weights("1,,2"), ConfigError);
  EXPECT_THROW(parse_weights("a,b"), ConfigError);
}

TEST_F(CliDir, ExitCodes) {
  EXPECT_EQ(run("collect --config " + (dir_ / "missing.toml").string()), 2);
  write_config("\n[typo]\nkey = 1\n");
  EXPECT_EQ(run("collect --config " + (dir_ / "cfg.toml").string() + " --out " + (dir_ / "o").string()), 2);
  EXPECT_NE(slurp(dir_ / "stderr.txt").find("typo.key"), std::string::npos);
  write_config();
  EXPECT_EQ(run("sweep --config " + (dir_ / "cfg.toml").string() + " --out " + (dir_ / "empty").string()), 2)
      << "sweep before collect has no dataset";
  EXPECT_EQ(run("bogus"), 2);
  EXPECT_EQ(run("collect --config " + (dir_ / "cfg.toml").string() + " --out " + (dir_ / "o").string()), 0);
}

TEST_F(CliDir, CollectIsDeterministicAndMatchesLibrary) {
  const fs::path cfg = write_config();
  ASSERT_EQ(run("collect --config " + cfg.string() + " --out " + (dir_ / "a").string()), 0);
  ASSERT_EQ(run("collect --config " + cfg.string() + " --out " + (dir_ / "b").string() + " --jobs 3"), 0);
  const std::string a = slurp(dir_ / "a" / kDatasetFile);
  EXPECT_EQ(a, slurp(dir_ / "b" / kDatasetFile));
  EXPECT_EQ(count(a, "\n"), 40u) << "one line per trajectory";

  std::ostringstream lib;
  write_dataset_jsonl(lib, collect_dataset(resolve_config(opts(dir_ / "a"))));
  EXPECT_EQ(lib.str(), a);

  ASSERT_EQ(run("collect --config " + cfg.string() + " --out " + (dir_ / "c").string() + " --seed 4"), 0);
  EXPECT_NE(slurp(dir_ / "c" / kDatasetFile), a);
}

TEST_F(CliDir, SweepWritesOneRowPerGridPoint) {
  const fs::path cfg = write_config();
  const std::string out = (dir_ / "o").string();
  ASSERT_EQ(run("collect --config " + cfg.string() + " --out " + out), 0);
  ASSERT_EQ(run("sweep --config " + cfg.string() + " --out " + out), 0);
  const std::string csv = slurp(dir_ / "o" / kSweepCsv);
  EXPECT_EQ(count(csv, "\n"), 1 + l1_ball_grid(2, 0.5).size());
  EXPECT_TRUE(fs::exists(dir_ / "o" / kSweepSvg));
  EXPECT_TRUE(fs::exists(dir_ / "o" / kCacheFile));

  // Same run again reuses the cache and reproduces the table byte for byte.
  ASSERT_EQ(run("sweep --config " + cfg.string() + " --out " + out), 0);
  EXPECT_EQ(slurp(dir_ / "o" / kSweepCsv), csv);
}

TEST_F(CliDir, DisabledConstraintsPlotASingleClass) {
  const fs::path cfg = write_config();
  std::string text = slurp(cfg);
  text.replace(text.find("grid_step"), 0, "enable_consistency = false\nenable_evaluability = false\n");
  std::ofstream(cfg) << text;
  const std::string out = (dir_ / "o").string();
  ASSERT_EQ(run("collect --config " + cfg.string() + " --out " + out), 0);
  ASSERT_EQ(run("sweep --config " + cfg.string() + " --out " + out), 0);
  const std::string svg = slurp(dir_ / "o" / kSweepSvg);
  EXPECT_EQ(count(svg, "class=\"legend\""), 1u);
  EXPECT_NE(svg.find(">accepted<"), std::string::npos);
}

TEST_F(CliDir, EvalLowerBoundBelowEstimate) {
  const fs::path cfg = write_config();
  const std::string out = (dir_ / "o").string();
  ASSERT_EQ(run("collect --config " + cfg.string() + " --out " + out), 0);
  ASSERT_EQ(run("eval --config " + cfg.string() + " --out " + out + " --w 0.5,0.5"), 0);
  std::istringstream csv(slurp(dir_ / "o" / kEvalCsv));
  std::string header, row;
  std::getline(csv, header);
  std::getline(csv, row);
  std::vector<double> cells;
  std::istringstream r(row);
  for (std::string c; std::getline(r, c, ',');) cells.push_back(std::stod(c));
  ASSERT_GE(cells.size(), 5u);
  EXPECT_LE(cells[3], cells[2]);  // V_lb <= V_hat
  EXPECT_GE(cells[4], 1.0);       // N_eff
}

TEST_F(CliDir, RunCommandMatchesLibraryCalls) {
  write_config();
  std::ostringstream log, err;
  ASSERT_EQ(run_command("collect", opts(dir_ / "x"), log, err), 0) << err.str();
  ASSERT_EQ(run("collect --config " + (dir_ / "cfg.toml").string() + " --out " + (dir_ / "y").string()), 0);
  EXPECT_EQ(slurp(dir_ / "x" / kDatasetFile), slurp(dir_ / "y" / kDatasetFile));

  CommandOptions o = opts(dir_ / "x");
  o.w = "0.25,0.75";
  ASSERT_EQ(run_command("eval", o, log, err), 0) << err.str();
  ASSERT_EQ(run("eval --config " + (dir_ / "cfg.toml").string() + " --out " + (dir_ / "y").string() +
                " --w 0.25,0.75"),
            0);
  EXPECT_EQ(slurp(dir_ / "x" / kEvalCsv), slurp(dir_ / "y" / kEvalCsv));
}

TEST_F(CliDir, WrongWeightDimensionIsConfigError) {
  write_config();
  std::ostringstream log, err;
  ASSERT_EQ(run_command("collect", opts(dir_ / "x"), log, err), 0);
  CommandOptions o = opts(dir_ / "x");
  o.w = "1,0,0";
  EXPECT_EQ(run_command("eval", o, log, err), 2);
}
