// Copyright 2026 The cvhide Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

fs::path scratch() {
  const fs::path dir = fs::path(testing::TempDir()) / "cvhide_cli_test";
  fs::create_directories(dir);
  return dir;
}

struct CliRun {
  int code;
  std::string out;
};

CliRun run(const std::string& args) {
  const std::string cmd = std::string(CVHIDE_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return {-1, ""};
  std::string out;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

TEST(Cli, EmptyGridIsUsageError) {
  EXPECT_EQ(run("mi-sweep --seed 1 --s-grid ''").code, 2);
}

TEST(Cli, MissingSeedIsUsageError) {
  EXPECT_EQ(run("multi-copy --s-grid 1").code, 2);
}

TEST(Cli, UnknownSubcommandAndBadValues) {
  EXPECT_EQ(run("frobnicate --seed 1").code, 2);
  EXPECT_EQ(run("thermal-separation --seed 1 --epsilon 1.5").code, 2);
  EXPECT_EQ(run("tv-sweep --seed 1 --s-grid 1,x").code, 2);
  EXPECT_EQ(run("tv-sweep --seed 1 --samples 10").code, 2);
}

TEST(Cli, UnknownConfigKeyIsUsageError) {
  const fs::path cfg = scratch() / "bad.toml";
  write(cfg, "seed = 1\nwidth = 3\n");
  EXPECT_EQ(run("validate --config " + cfg.string()).code, 2);
}

TEST(Cli, ValidatePassesAndFailsOnBadTolerance) {
  const CliRun ok = run("validate --seed 0");
  EXPECT_EQ(ok.code, 0);
  EXPECT_NE(ok.out.find("EPR measurement violates PPT"), std::string::npos);
  EXPECT_NE(run("validate --seed 0 --tol -1").code, 0);
}

TEST(Cli, SameSeedSameBytes) {
  const fs::path a = scratch() / "a.csv";
  const fs::path b = scratch() / "b.csv";
  const std::string common =
      "multi-copy --seed 7 --s-grid 1,2 --n-copies 4 --restarts 2 --max-iters 150 --out ";
  ASSERT_EQ(run(common + a.string()).code, 0);
  ASSERT_EQ(run(common + b.string()).code, 0);
  const std::string sa = slurp(a);
  EXPECT_EQ(sa, slurp(b));
  EXPECT_EQ(sa.rfind("# config-hash: fnv1a64:", 0), 0u);
  EXPECT_EQ(sa.find('\r'), std::string::npos);
}

TEST(Cli, ThermalSeparationReproducible) {
  const fs::path a = scratch() / "ta.csv";
  const fs::path b = scratch() / "tb.csv";
  const std::string common =
      "thermal-separation --seed 3 --epsilon 0.05 -N 5 --samples 5000 --out ";
  const CliRun ra = run(common + a.string());
  ASSERT_EQ(ra.code, 0);
  ASSERT_EQ(run(common + b.string()).code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_NE(ra.out.find("\"separated\""), std::string::npos);
}

TEST(Cli, ConfigFileAndFlagPrecedence) {
  const fs::path cfg = scratch() / "run.toml";
  const fs::path a = scratch() / "cfg.csv";
  const fs::path b = scratch() / "flag.csv";
  write(cfg, "# small run\nexperiment = \"multi-copy\"\nseed = 5\ns_grid = [1]\n"
             "n_copies = 2\nrestarts = 2\nmax_iters = 150\n");
  ASSERT_EQ(run("--config " + cfg.string() + " --out " + a.string()).code, 0);
  ASSERT_EQ(run("--config " + cfg.string() + " --seed 6 --out " + b.string()).code, 0);
  const std::string sa = slurp(a);
  const std::string sb = slurp(b);
  EXPECT_NE(sa.find("seed=5"), std::string::npos);
  EXPECT_NE(sb.find("seed=6"), std::string::npos);
  // Same subcommand on the command line is accepted; a different one conflicts.
  EXPECT_EQ(run("multi-copy --config " + cfg.string() + " --out " + a.string()).code, 0);
  EXPECT_EQ(run("tv-sweep --config " + cfg.string()).code, 2);
}

TEST(Cli, MiSweepWritesCurveAndTrace) {
  const fs::path out = scratch() / "mi.csv";
  const CliRun r = run("mi-sweep --seed 2 --s-grid 0,1 --restarts 2 --max-iters 200 --out " +
                    out.string());
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(fs::exists(scratch() / "mi.curve.csv"));
  EXPECT_TRUE(fs::exists(scratch() / "mi.trace.csv"));
  EXPECT_NE(r.out.find("glocc_slope"), std::string::npos);
  const std::string curve = slurp(scratch() / "mi.curve.csv");
  EXPECT_NE(curve.find("s,sigma,constrained,objective,value,ppt_margin,bona_fide_margin,seed"),
            std::string::npos);
}

}  // namespace
