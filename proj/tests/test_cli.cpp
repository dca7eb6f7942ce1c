#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <gtest/gtest.h>

namespace fs = std::filesystem;

namespace {

const char* kLinear =
    R"({"measure": {"class": "custom", "params": {"dominating": {"kind": "uniform", "lo": 0, "hi": 1},
        "ratio": {"kind": "linear", "intercept": 0, "slope": 1}}}, "m_list": [2, 4], "replications": 300})";

const char* kDivergent =
    R"({"measure": {"class": "custom", "params": {"dominating": {"kind": "inverse_square"},
        "ratio": {"kind": "linear", "intercept": 0.5, "slope": 0}}}, "m": 2})";

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("levyeq_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) const {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  int run(const std::string& args, const std::string& env = "") const {
    const std::string cmd = env + " " LEVYEQ_CLI_PATH " " + args + " >" + (dir_ / "stdout").string() + " 2>" +
                            (dir_ / "stderr").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string stderr_text() const { return slurp(dir_ / "stderr"); }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

TEST_F(Cli, EveryCommandSucceedsOnLinearMeasure) {
  const auto cfg = write("linear.json", kLinear);
  for (const char* cmd : {"discretize", "bound", "simulate", "counts", "verify", "sweep", "conditions"}) {
    const auto out = dir_ / cmd;
    EXPECT_EQ(run(std::string(cmd) + " --config " + cfg.string() + " --out " + out.string()), 0) << cmd;
    EXPECT_TRUE(fs::exists(out / "report.json")) << cmd;
    EXPECT_TRUE(fs::exists(out / "resolved_config.json")) << cmd;
  }
  EXPECT_TRUE(fs::exists(dir_ / "discretize" / "ratios_m4.csv"));
}

TEST_F(Cli, RerunsAreByteIdentical) {
  const auto cfg = write("linear.json", kLinear);
  for (const char* cmd : {"simulate", "verify"}) {
    ASSERT_EQ(run(std::string(cmd) + " --config " + cfg.string() + " --out " + (dir_ / "a").string()), 0);
    ASSERT_EQ(run(std::string(cmd) + " --config " + cfg.string() + " --threads 3 --out " + (dir_ / "b").string()),
              0);
    for (const auto& entry : fs::directory_iterator(dir_ / "a")) {
      EXPECT_EQ(slurp(entry.path()), slurp(dir_ / "b" / entry.path().filename())) << entry.path();
    }
  }
}

TEST_F(Cli, ResolvedConfigReruns) {
  const auto cfg = write("linear.json", kLinear);
  ASSERT_EQ(run("bound --config " + cfg.string() + " --seed 5 --out " + (dir_ / "a").string()), 0);
  const auto resolved = dir_ / "a" / "resolved_config.json";
  ASSERT_EQ(run("bound --config " + resolved.string() + " --out " + (dir_ / "b").string()), 0);
  EXPECT_EQ(slurp(dir_ / "a" / "report.json"), slurp(dir_ / "b" / "report.json"));
}

TEST_F(Cli, FailedReportExitsOne) {
  const auto cfg = write("div.json", kDivergent);
  EXPECT_EQ(run("conditions --config " + cfg.string() + " --out " + (dir_ / "o").string()), 1);
}

TEST_F(Cli, ConfigErrorExitsTwoAndNamesField) {
  const auto cfg = write("bad.json", R"({"measure": {"class": "example2",
      "params": {"lambda": 1, "epsilon": 0.5, "M": 2}}, "m": 0})");
  EXPECT_EQ(run("bound --config " + cfg.string() + " --out " + (dir_ / "o").string()), 2);
  EXPECT_NE(stderr_text().find("offending field: m"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir_ / "o" / "report.json"));
}

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("bound"), 2);
  EXPECT_EQ(run("bound --config " + (dir_ / "missing.json").string()), 2);
}

TEST_F(Cli, DivergenceExitsThree) {
  const auto cfg = write("div.json", kDivergent);
  EXPECT_EQ(run("bound --config " + cfg.string() + " --out " + (dir_ / "o").string()), 3);
}

TEST_F(Cli, OutputDirectoryPrecedence) {
  std::string cfg_text = kLinear;
  cfg_text.insert(cfg_text.size() - 1, ", \"output_dir\": \"" + (dir_ / "from_config").string() + "\"");
  const auto cfg = write("with_dir.json", cfg_text);
  const std::string env = "LEVYEQ_OUT_DIR=" + (dir_ / "from_env").string();
  ASSERT_EQ(run("discretize --config " + cfg.string(), env), 0);
  EXPECT_TRUE(fs::exists(dir_ / "from_config" / "report.json"));
  ASSERT_EQ(run("discretize --config " + cfg.string() + " --out " + (dir_ / "from_flag").string(), env), 0);
  EXPECT_TRUE(fs::exists(dir_ / "from_flag" / "report.json"));
  const auto plain = write("plain.json", kLinear);
  ASSERT_EQ(run("discretize --config " + plain.string(), env), 0);
  EXPECT_TRUE(fs::exists(dir_ / "from_env" / "report.json"));
}

}  // namespace
