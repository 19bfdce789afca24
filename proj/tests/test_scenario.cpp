#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hlab/errors.hpp"
#include "hlab/scenario.hpp"

using namespace hlab;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = HLAB_CONFIG_DIR;

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("hlab_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string config_error(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

constexpr const char* kMinimal = R"({"geometry": {"preset": "euclidean", "n": 2}})";

}  // namespace

TEST(Config, MinimalDocumentTakesDefaults) {
  const Scenario s = parse_config_text(kMinimal);
  EXPECT_EQ(s.pde.nr, ScenarioDefaults::kGridNr);
  EXPECT_EQ(s.pde.nt, ScenarioDefaults::kGridNt);
  EXPECT_EQ(s.pde.T, ScenarioDefaults::kFinalTime);
  EXPECT_EQ(s.harnack.m, 2.0);
  EXPECT_EQ(s.verification.tolerance, ScenarioDefaults::kTolerance);
  EXPECT_EQ(s.verification.pairs, ScenarioDefaults::kHarnackPairs);
  EXPECT_FALSE(s.sweep.has_value());
}

TEST(Config, AlphaBelowOneNamesThePath) {
  const std::string msg = config_error(
      R"({"geometry": {"preset": "euclidean", "n": 2}, "harnack": {"alpha": 0.5}})");
  EXPECT_NE(msg.find("$.harnack.alpha"), std::string::npos) << msg;
  EXPECT_NE(msg.find("alpha must be > 1"), std::string::npos) << msg;
}

TEST(Config, UnknownKeyIsRejected) {
  const std::string msg = config_error(
      R"({"geometry": {"preset": "euclidean", "n": 2}, "harnack": {"alpah": 2}})");
  EXPECT_NE(msg.find("unknown key 'alpah'"), std::string::npos) << msg;
  EXPECT_NE(msg.find("$.harnack"), std::string::npos) << msg;
}

TEST(Config, TypeMismatchIsRejected) {
  const std::string msg = config_error(R"({"geometry": {"preset": "euclidean", "n": 2}, "pde": {"p": "two"}})");
  EXPECT_NE(msg.find("$.pde.p"), std::string::npos) << msg;
  EXPECT_FALSE(config_error("{").empty());
  EXPECT_FALSE(config_error(R"({"pde": {}})").empty());
}

TEST(Config, ShippedConfigsParse) {
  int count = 0;
  for (const auto& entry : fs::directory_iterator(kConfigs)) {
    if (entry.path().extension() != ".json") continue;
    EXPECT_NO_THROW(load_config(entry.path())) << entry.path();
    ++count;
  }
  EXPECT_GE(count, 8);
}

TEST(Config, MissingFileIsIoError) {
  EXPECT_THROW(load_config(kConfigs / "does_not_exist.json"), IoError);
}

TEST(Commands, ParseAndPrint) {
  for (const char* name : {"solve", "check-identities", "check-estimate", "check-harnack", "report"})
    EXPECT_EQ(to_string(parse_command(name)), name);
  EXPECT_THROW(parse_command("sweep-all"), ConfigError);
}

TEST(Run, EstimateCheckPassesAndWritesCsv) {
  const Scenario s = load_config(kConfigs / "barenblatt_euclidean.json");
  const fs::path out = fresh_dir("estimate");
  const RunResult r = run_scenario(s, Command::kCheckEstimate, RunOptions{out, false});
  EXPECT_EQ(r.exit_code, kExitPass) << r.summary;
  EXPECT_EQ(r.violations, 0);
  EXPECT_TRUE(fs::exists(out / "summary.txt"));
  const std::string csv = read(out / "estimate_thm21-local.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "r,t,lhs,rhs,margin");
}

TEST(Run, NegativeControlReportsViolations) {
  const Scenario s = load_config(kConfigs / "barenblatt_euclidean.json");
  const RunResult r = run_scenario(s, Command::kCheckEstimate, RunOptions{{}, true});
  EXPECT_EQ(r.exit_code, kExitViolation);
  EXPECT_GT(r.violations, 0);
}

TEST(Run, IdentityCheckPassesAndWritesCsv) {
  const Scenario s = load_config(kConfigs / "evolving_warp_identities.json");
  const fs::path out = fresh_dir("identities");
  const RunResult r = run_scenario(s, Command::kCheckIdentities, RunOptions{out, false});
  EXPECT_EQ(r.exit_code, kExitPass) << r.summary;
  EXPECT_TRUE(fs::exists(out / "identities.csv"));
  EXPECT_TRUE(fs::exists(out / "commutator.csv"));
  EXPECT_FALSE(r.identities.empty());
}

TEST(Run, HarnackCheckPasses) {
  const Scenario s = load_config(kConfigs / "manufactured_hyperbolic.json");
  const RunResult r = run_scenario(s, Command::kCheckHarnack, RunOptions{});
  EXPECT_EQ(r.exit_code, kExitPass) << r.summary;
  ASSERT_TRUE(r.harnack.has_value());
  EXPECT_GE(r.harnack->pairs.size(), 100u);
}

TEST(Run, HarnackWithPresetAlphaIsConfigError) {
  const Scenario s = load_config(kConfigs / "alpha_preset_exp.json");
  EXPECT_EQ(run_scenario(s, Command::kCheckHarnack, RunOptions{}).exit_code, kExitConfig);
}

TEST(Run, UnwritableOutputIsIoError) {
  const fs::path blocker = fresh_dir("io") / "file";
  std::ofstream(blocker) << "x";
  const Scenario s = parse_config_text(
      R"({"geometry": {"preset": "euclidean", "n": 2}, "pde": {"grid": {"nr": 17, "nt": 9}}})");
  const RunResult r = run_scenario(s, Command::kSolve, RunOptions{blocker / "sub", false});
  EXPECT_EQ(r.exit_code, kExitIo) << r.summary;
}

TEST(Sweep, CartesianProductIsDeterministic) {
  const Scenario s = load_config(kConfigs / "sweep_p_alpha.json");
  const SweepResult one = sweep(s, SweepOptions{{}, 1, false});
  const SweepResult four = sweep(s, SweepOptions{{}, 4, false});
  EXPECT_EQ(one.rows, 9);
  EXPECT_EQ(one.exit_code, kExitPass);
  EXPECT_EQ(one.csv, four.csv);
  EXPECT_EQ(std::count(one.csv.begin(), one.csv.end(), '\n'), 10);
  // Last axis varies fastest.
  std::istringstream lines(one.csv);
  std::string header, first, second;
  std::getline(lines, header);
  std::getline(lines, first);
  std::getline(lines, second);
  EXPECT_EQ(first.substr(0, 10), "0,1.5,1.5,");
  EXPECT_EQ(second.substr(0, 10), "1,1.5,2.0,");
}

TEST(Sweep, EmptyAxisAndCapAreConfigErrors) {
  Scenario s = load_config(kConfigs / "sweep_p_alpha.json");
  Scenario empty = s;
  empty.sweep->axes[0].values.clear();
  EXPECT_THROW(sweep(empty, SweepOptions{}), ConfigError);
  Scenario capped = s;
  capped.sweep->cap = 8;
  EXPECT_THROW(sweep(capped, SweepOptions{}), ConfigError);
}

TEST(Sweep, InvalidCombinationIsReportedPerRow) {
  Scenario s = load_config(kConfigs / "sweep_p_alpha.json");
  s.sweep->axes[1].values = {0.5, 2.0};
  s.sweep->axes[0].values = {2.0};
  const SweepResult r = sweep(s, SweepOptions{});
  EXPECT_EQ(r.rows, 2);
  EXPECT_EQ(r.exit_code, kExitConfig);
}

TEST(SetDotted, CreatesIntermediateObjects) {
  nlohmann::json doc = nlohmann::json::parse(R"({"a": {"b": 1}})");
  set_dotted(doc, "a.b", 2);
  set_dotted(doc, "x.y.z", "w");
  EXPECT_EQ(doc["a"]["b"], 2);
  EXPECT_EQ(doc["x"]["y"]["z"], "w");
  EXPECT_THROW(set_dotted(doc, "a.b.c", 1), ConfigError);
  EXPECT_THROW(set_dotted(doc, "a..b", 1), ConfigError);
  EXPECT_THROW(set_dotted(doc, "", 1), ConfigError);
}
