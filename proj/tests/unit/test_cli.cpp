// Copyright 2026 The pfsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(PFSIM_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path fresh_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("pfsim_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST(cli, version_and_help) {
  EXPECT_EQ(run_cli("--version"), 0);
  EXPECT_EQ(run_cli("--help"), 0);
}

TEST(cli, analytic_run_writes_report_and_manifest) {
  const auto dir = fresh_dir("compile");
  ASSERT_EQ(run_cli("compile --out " + dir.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "compile.json"));
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_TRUE(manifest["runs"].contains("compile"));
  fs::remove_all(dir);
}

TEST(cli, csv_format_splits_tables) {
  const auto dir = fresh_dir("csv");
  ASSERT_EQ(run_cli("kcbs --grid-step 0.5 --format csv --out " + dir.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "kcbs_orthogonality.csv"));
  EXPECT_TRUE(fs::exists(dir / "kcbs_K_flip.csv"));
  EXPECT_TRUE(fs::exists(dir / "kcbs_K_hopping.csv"));
  fs::remove_all(dir);
}

TEST(cli, configuration_errors_exit_with_two) {
  EXPECT_EQ(run_cli("noise --shots 10"), 2);  // stochastic run without a seed
  EXPECT_EQ(run_cli("noise --grid-step 0.3"), 2);
  EXPECT_EQ(run_cli("noise --bogus"), 2);
  EXPECT_EQ(run_cli("kcbs --format xml"), 2);
  EXPECT_EQ(run_cli(""), 2);
}

TEST(cli, seeded_runs_are_byte_identical) {
  const auto a = fresh_dir("seed_a");
  const auto b = fresh_dir("seed_b");
  const std::string args = "kcbs --seed 17 --shots 20000 --grid-step 0.5 --resamples 10 --out ";
  ASSERT_EQ(run_cli(args + a.string()), 0);
  ASSERT_EQ(run_cli(args + b.string()), 0);
  EXPECT_EQ(slurp(a / "kcbs.json"), slurp(b / "kcbs.json"));
  fs::remove_all(a);
  fs::remove_all(b);
}
