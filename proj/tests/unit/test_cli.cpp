#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <gtest/gtest.h>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result slotex(const std::string& args) {
  const std::string cmd = std::string(SLOTEX_CLI_PATH) + " " + args + " 2>&1";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  while (std::size_t n = fread(buf.data(), 1, buf.size(), p)) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("slotex_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    std::ofstream(dir_ / "small.cfg") << "population = 16\nruns = 2\ntail_days = 3\nseed = 4\nthreads = 2\n";
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string cfg() const { return "--config " + (dir_ / "small.cfg").string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, ValidateOk) {
  const Result r = slotex("validate " + cfg());
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("config OK"), std::string::npos);
}

TEST_F(Cli, ConfigErrorsExitTwo) {
  EXPECT_EQ(slotex("validate " + cfg() + " --beta 0").code, 2);
  const Result missing = slotex("validate --config " + (dir_ / "nope.cfg").string());
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.out.find("config not found"), std::string::npos);
  EXPECT_EQ(slotex("run " + cfg() + " --curves nosuch:1").code, 2);
  EXPECT_EQ(slotex("sweep " + cfg() + " --axis beta --values 1,-2 --out " + (dir_ / "s").string()).code, 2);
  EXPECT_FALSE(fs::exists(dir_ / "s"));
  EXPECT_EQ(slotex("frobnicate").code, 2);
}

TEST_F(Cli, RunWritesArtifacts) {
  const fs::path out = dir_ / "run";
  const Result r = slotex("run " + cfg() + " --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(out / "daily_0.csv"));
  EXPECT_TRUE(fs::exists(out / "runs.csv"));
  EXPECT_TRUE(fs::exists(out / "manifest.json"));
  EXPECT_FALSE(fs::exists(out / "INCOMPLETE"));
  EXPECT_EQ(lines(read(out / "runs.csv")), 2u);
}

TEST_F(Cli, BatchIsReproducible) {
  const fs::path a = dir_ / "a", b = dir_ / "b";
  ASSERT_EQ(slotex("batch " + cfg() + " --out " + a.string()).code, 0);
  ASSERT_EQ(slotex("batch " + cfg() + " --threads 1 --out " + b.string()).code, 0);
  for (const char* f : {"runs.csv", "batch.csv", "daily_0.csv", "daily_1.csv"}) EXPECT_EQ(read(a / f), read(b / f)) << f;
  const std::string manifest = read(a / "manifest.json");
  EXPECT_NE(manifest.find("\"artifact_version\""), std::string::npos);
  EXPECT_NE(manifest.find("\"hash\""), std::string::npos);
}

TEST_F(Cli, SweepWritesOneRowPerValue) {
  const fs::path out = dir_ / "sweep";
  const Result r = slotex("sweep " + cfg() + " --axis population --values 8,10,12,14,16,18,20,22 --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(lines(read(out / "sweep.csv")), 9u);
  EXPECT_TRUE(fs::exists(out / "population_7" / "runs.csv"));
}

TEST_F(Cli, FlatOptimum) {
  // Exact mean of sum_h min(R_h, 16) / 384 for 96 uniform draws of 4 distinct
  // hours, where R_h ~ Binomial(96, 1/6): 0.9094.
  const Result r = slotex("optimum --curve flat --population 96 --samples 400");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto pos = r.out.find("mean optimum: ");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_NEAR(std::stod(r.out.substr(pos + 14)), 0.9094, 0.01);
}
