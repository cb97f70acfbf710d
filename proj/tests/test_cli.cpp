#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include <moyal/moyal.hpp>

using namespace moyal;
namespace fs = std::filesystem;

namespace {

json minimal(const std::string& experiment) {
  json j = json::parse(R"({"theta": {"d": 2, "theta0": 1.0}, "grid": {"L": 8.0, "N": 64},
                           "symbols": [{"type": "gaussian", "s": 1.0}]})");
  j["experiment"] = experiment;
  return j;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("moyal_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// runs the CLI inside `dir`, returns its exit status
int run_cli(const fs::path& dir, const std::string& args) {
  const std::string cmd = "cd '" + dir.string() + "' && '" + MOYAL_CLI_PATH + "' " + args + " > cli.log 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string config(const std::string& name) { return std::string(MOYAL_CONFIG_DIR) + "/" + name; }

}  // namespace

TEST(Config, EmptySymbols) {
  json j = minimal("trace");
  j["symbols"] = json::array();
  try {
    parse_config(j);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("symbols"), std::string::npos);
  }
}

TEST(Config, FieldErrors) {
  json j = minimal("trace");
  j["tolerances"] = {{"rel_err", -1.0}};
  EXPECT_THROW(parse_config(j), ConfigError);
  EXPECT_THROW(parse_config(minimal("nosuch")), ConfigError);
  json k = minimal("trace");
  k.erase("grid");
  EXPECT_THROW(parse_config(k), ConfigError);
  json s = minimal("trace");
  s["symbols"][0]["s"] = -2.0;
  EXPECT_THROW(parse_config(s), ConfigError);
}

TEST(Config, DefaultsAndOverrides) {
  ExperimentConfig c = parse_config(minimal("trace"));
  EXPECT_EQ(c.output, "trace");
  EXPECT_EQ(c.grid.N, 64);
  apply_overrides(c, {128, 6.0, 0.5});
  EXPECT_EQ(c.grid.N, 128);
  EXPECT_EQ(c.grid.L, 6.0);
  EXPECT_DOUBLE_EQ(c.theta(0, 1), 0.5);
}

TEST(Config, ParseErrorCarriesLine) {
  const fs::path dir = scratch("parse");
  std::ofstream(dir / "bad.json") << "{\n  \"experiment\": \"trace\",\n  \"theta\": {\n}}}\n";
  try {
    load_config((dir / "bad.json").string());
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
  }
}

TEST(Describe, Topics) {
  EXPECT_NE(describe("star-series").find("Eq. (1.1)"), std::string::npos);
  EXPECT_NE(describe("bridge").find("Eq. (6.6)"), std::string::npos);
  for (auto& [name, text] : describe_topics()) EXPECT_NE(describe(name).find("Fourier"), std::string::npos) << name;
  try {
    describe("nosuch");
    FAIL();
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("star-series"), std::string::npos);
  }
}

TEST(Report, SchemaAndFailedCheck) {
  Report r;
  r.experiment = "trace";
  r.below("a", 0.5, 1.0);
  EXPECT_TRUE(r.passed());
  r.below("b", 2.0, 1.0);
  EXPECT_FALSE(r.passed());
  const json j = r.to_json();
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["checks"].size(), 2u);
  EXPECT_FALSE(j["passed"].get<bool>());
}

TEST(Report, NumericalErrorBecomesFailedCheck) {
  // a series order beyond the grid limit fails the check instead of throwing
  json j = minimal("star-compare");
  j["symbols"].push_back({{"type", "gaussian"}, {"s", 0.5}});
  j["parameters"] = {{"series_order", 40}};
  const Report r = run_experiment(parse_config(j));
  EXPECT_FALSE(r.passed());
  bool found = false;
  for (auto& c : r.checks)
    if (c.name == "series vs integral") found = !c.passed;
  EXPECT_TRUE(found);
}

TEST(Cli, TraceRunsAndIsDeterministic) {
  const fs::path dir = scratch("trace");
  ASSERT_EQ(run_cli(dir, "run '" + config("trace.json") + "'"), 0) << slurp(dir / "cli.log");
  const std::string first = slurp(dir / "out/trace.report.json");
  const json j = json::parse(first);
  EXPECT_TRUE(j["passed"].get<bool>());
  EXPECT_LT(j["fields"]["rel_err"].get<double>(), 1e-8);
  ASSERT_EQ(run_cli(dir, "run '" + config("trace.json") + "'"), 0);
  EXPECT_EQ(slurp(dir / "out/trace.report.json"), first);
}

TEST(Cli, ApproxIdPlot) {
  const fs::path dir = scratch("approx");
  ASSERT_EQ(run_cli(dir, "run '" + config("approx-id.json") + "'"), 0) << slurp(dir / "cli.log");
  std::ifstream csv(dir / "out/approx-id.plot.csv");
  std::string line;
  int rows = -1;  // header
  while (std::getline(csv, line))
    if (!line.empty()) ++rows;
  EXPECT_EQ(rows, 4);
  const json j = json::parse(slurp(dir / "out/approx-id.report.json"));
  const double slope = j["fields"]["slope"];
  EXPECT_GE(slope, -1.3);
  EXPECT_LE(slope, -0.8);
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("exit");
  // an impossible tolerance fails a check
  json j = json::parse(slurp(config("trace.json")));
  j["tolerances"]["rel_err"] = 1e-300;
  j["output"] = "strict";
  std::ofstream(dir / "strict.json") << j.dump(2);
  EXPECT_EQ(run_cli(dir, "run strict.json"), 1);
  EXPECT_TRUE(fs::exists(dir / "strict.report.json"));

  j["symbols"] = json::array();
  std::ofstream(dir / "empty.json") << j.dump(2);
  EXPECT_EQ(run_cli(dir, "run empty.json"), 2);
  EXPECT_NE(slurp(dir / "cli.log").find("ConfigError"), std::string::npos);

  EXPECT_EQ(run_cli(dir, "describe nosuch"), 2);
  EXPECT_EQ(run_cli(dir, "describe bridge"), 0);
  EXPECT_NE(slurp(dir / "cli.log").find("Eq. (6.6)"), std::string::npos);
  EXPECT_EQ(run_cli(dir, "frobnicate"), 2);
}

TEST(Cli, GridOverride) {
  const fs::path dir = scratch("override");
  ASSERT_EQ(run_cli(dir, "run '" + config("trace.json") + "' --grid-N 64 --theta0 0.5"), 0) << slurp(dir / "cli.log");
  const json j = json::parse(slurp(dir / "out/trace.report.json"));
  EXPECT_EQ(j["fields"]["grid"]["N"], 64);
  EXPECT_EQ(j["fields"]["theta"][0][1], 0.5);
}
