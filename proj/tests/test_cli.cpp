#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Outcome {
  int code = -1;
  std::string out;  // stdout and stderr together
};

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("dbl_cli_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

Outcome run_cli(const std::string& args) {
  const std::string cmd = std::string(DBL_CLI_PATH) + " " + args + " 2>&1";
  Outcome o;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return o;
  char buf[512];
  while (std::fgets(buf, sizeof buf, p)) o.out += buf;
  const int st = pclose(p);
  o.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return o;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

json small_run(const fs::path& out) {
  return {{"equation", {{"type", "pure_power"}, {"alpha", 1.0}}},
          {"grid", {{"n", 64}}},
          {"time", {{"dt", 1e-3}, {"t_final", 0.1}, {"record_every", 20}}},
          {"diagnostics", {{"n0", 8}}},
          {"output", {{"dir", out.string()}}}};
}

}  // namespace

TEST(Cli, HelpAndUsage) {
  EXPECT_EQ(run_cli("--help").code, 0);
  EXPECT_EQ(run_cli("").code, 1);
  EXPECT_EQ(run_cli("simulate").code, 1);  // --config is required
  EXPECT_EQ(run_cli("frobnicate --config x.json").code, 1);
}

TEST(Cli, SimulateWritesOutputs) {
  const auto d = scratch("simulate");
  const auto cfg = write_config(d, small_run(d / "out").dump());
  const auto o = run_cli("simulate --config " + cfg.string());
  ASSERT_EQ(o.code, 0) << o.out;
  EXPECT_TRUE(fs::exists(d / "out" / "spec.json"));
  EXPECT_TRUE(fs::exists(d / "out" / "results.csv"));
  EXPECT_TRUE(fs::exists(d / "out" / "energies.jsonl"));
  EXPECT_TRUE(fs::exists(d / "out" / "snapshots" / "u_00005.csv"));
  const json s = json::parse(slurp(d / "out" / "summary.json"));
  EXPECT_TRUE(s.at("passed").get<bool>());
  EXPECT_LT(s.at("mass_rel_drift").get<double>(), 1e-12);
}

TEST(Cli, OutputFlagOverridesConfig) {
  const auto d = scratch("override");
  const auto cfg = write_config(d, small_run(d / "a").dump());
  ASSERT_EQ(run_cli("simulate --config " + cfg.string() + " --output " + (d / "b").string()).code, 0);
  EXPECT_TRUE(fs::exists(d / "b" / "results.csv"));
  EXPECT_FALSE(fs::exists(d / "a"));
}

TEST(Cli, ConfigErrorsExitOne) {
  const auto d = scratch("config_errors");
  auto j = small_run(d / "out");
  j["grid"]["n"] = 48;
  EXPECT_EQ(run_cli("simulate --config " + write_config(d, j.dump()).string()).code, 1);
  j = small_run(d / "out");
  j["time"]["sheme"] = "ifrk4";
  const auto o = run_cli("simulate --config " + write_config(d, j.dump()).string());
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.out.find("sheme"), std::string::npos);
  EXPECT_EQ(run_cli("simulate --config " + (d / "missing.json").string()).code, 1);
}

TEST(Cli, MalformedJsonReportsLineAndColumn) {
  const auto d = scratch("malformed");
  const auto cfg = write_config(d, "{\n  \"equation\": {\"type\": \"ilw\",\n    \"alpha\": 1,,\n  }\n}\n");
  const auto o = run_cli("simulate --config " + cfg.string());
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.out.find(":3:"), std::string::npos) << o.out;
  EXPECT_NE(o.out.find("malformed JSON"), std::string::npos) << o.out;
}

TEST(Cli, FailedCheckExitsTwo) {
  // slopes cannot fall in an impossible window
  const auto d = scratch("failed_check");
  auto j = small_run(d / "out");
  j["convergence"] = {{"dts", {4e-3, 2e-3}}, {"slope_min", 10.0}, {"slope_max", 11.0}};
  const auto o = run_cli("convergence --config " + write_config(d, j.dump()).string());
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.out.find("check failed: temporal_order"), std::string::npos) << o.out;
  EXPECT_FALSE(json::parse(slurp(d / "out" / "summary.json")).at("passed").get<bool>());
}

TEST(Cli, RerunFromEchoIsByteIdentical) {
  const auto d = scratch("determinism");
  auto j = small_run(d / "first");
  j["initial"] = {{"kind", "random_hs"}, {"amplitude", 0.1}, {"seed", 7}};
  ASSERT_EQ(run_cli("simulate --config " + write_config(d, j.dump()).string()).code, 0);
  const auto echo = d / "first" / "spec.json";
  ASSERT_EQ(run_cli("simulate --config " + echo.string() + " --output " + (d / "second").string()).code, 0);
  EXPECT_EQ(slurp(d / "first" / "results.csv"), slurp(d / "second" / "results.csv"));
}

TEST(Cli, LinearRunKeepsBlockEnergies) {
  const auto d = scratch("linear");
  auto j = small_run(d / "out");
  j["time"]["nonlinear"] = false;
  j["initial"] = {{"kind", "random_hs"}, {"amplitude", 0.1}, {"seed", 5}, {"params", {{"kmax", 20}}}};
  ASSERT_EQ(run_cli("simulate --config " + write_config(d, j.dump()).string()).code, 0);
  const json s = json::parse(slurp(d / "out" / "summary.json"));
  EXPECT_LT(s.at("linear_block_energy_variation").get<double>(), 1e-10);
  EXPECT_TRUE(s.contains("linear_modified_energy_variation"));
}
