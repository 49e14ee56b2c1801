#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ringstab/cli/commands.hpp"
#include "ringstab/cli/scenario.hpp"

using namespace ringstab;
using namespace ringstab::cli;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("ringstab_scenario_" + name);
  std::filesystem::remove_all(p);
  return p;
}

std::vector<std::string> lines_of(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(f, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST(Scenario, PresetsValidate) {
  for (const auto& name : preset_names()) EXPECT_NO_THROW(preset(name).validate()) << name;
  EXPECT_THROW((void)preset("nope"), ConfigError);
}

TEST(Scenario, TomlOverlay) {
  ScenarioConfig c = preset("paper-iv");
  apply_toml_text(c, R"(
[model]
beta_lower = 0.8
beta_upper = [2.0, 2.0, 2.0]
sigmoid = "tanh"
[fleet]
n_av = 5
[platoon]
n = 32
m = 5
av_indices = [1, 9, 17, 21, 25]
[output]
dir = "elsewhere"
)");
  EXPECT_EQ(c.model.bounds.lower.damping, 0.8);
  EXPECT_EQ(c.model.param.sigmoid, SigmoidKind::Tanh);
  EXPECT_EQ(c.fleet.n_av, 5);
  EXPECT_EQ(c.platoon.placement, Placement::Explicit);
  EXPECT_EQ(c.output_dir, "elsewhere");
  EXPECT_NO_THROW(c.validate());
}

TEST(Scenario, ShippedConfigsLoad) {
  int seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(RINGSTAB_CONFIG_DIR)) {
    if (entry.path().extension() != ".toml") continue;
    ScenarioConfig c;
    EXPECT_NO_THROW(apply_toml_file(c, entry.path())) << entry.path();
    EXPECT_NO_THROW(c.validate()) << entry.path();
    ++seen;
  }
  EXPECT_GE(seen, 4);
  ScenarioConfig c;
  apply_toml_file(c, std::filesystem::path(RINGSTAB_CONFIG_DIR) / "appendix-g.toml");
  EXPECT_EQ(c.platoon.placement, Placement::Greedy);
  EXPECT_EQ(c.model.bounds.lower.stiffness, 0.8);
}

TEST(Scenario, UnknownKeysRejected) {
  ScenarioConfig c;
  EXPECT_THROW(apply_toml_text(c, "[model]\nbeta_uper = 2.0\n"), ConfigError);
  EXPECT_THROW(apply_toml_text(c, "[modle]\nhv = 1.0\n"), ConfigError);
  EXPECT_THROW(apply_toml_text(c, "stray = 1\n"), ConfigError);
}

TEST(Scenario, IllTypedValuesRejected) {
  ScenarioConfig c;
  EXPECT_THROW(apply_toml_text(c, "[fleet]\nn_hv = 2.5\n"), ConfigError);
  EXPECT_THROW(apply_toml_text(c, "[model]\nhv = [1, 2]\n"), ConfigError);
  EXPECT_THROW(apply_toml_text(c, "[model]\nsigmoid = \"relu\"\n"), ConfigError);
  EXPECT_THROW(apply_toml_text(c, "[model\n"), ConfigError);
}

TEST(Scenario, ValidationCatchesBadPlatoon) {
  ScenarioConfig c;
  c.platoon.m = c.platoon.n;
  EXPECT_THROW(c.validate(), ConfigError);
  c = ScenarioConfig{};
  c.platoon.placement = Placement::Explicit;
  c.platoon.av_indices = {1, 1};
  c.platoon.m = 2;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Sweep, GridDefinitions) {
  const SweepPoint u = sweep_point(SweepScenario::Upper, 2);
  EXPECT_EQ(u.value, 2.0);
  EXPECT_EQ(u.bounds.upper.stiffness, 2.0);
  EXPECT_EQ(u.bounds.lower.damping, 0.01);
  const SweepPoint l = sweep_point(SweepScenario::Lower, 301);
  EXPECT_EQ(l.value, 1.0);
  EXPECT_EQ(l.bounds.upper.rel_velocity, 2.0);
  EXPECT_NEAR(sweep_point(SweepScenario::Lower, 1).value, 1e-12, 1e-24);
  EXPECT_EQ(sweep_points({SweepScenario::Upper, 1, 0, 1}).size(), 300u);
  EXPECT_EQ(sweep_points({SweepScenario::Lower, 1, 0, 10}).size(), 31u);
  EXPECT_THROW((void)sweep_points({SweepScenario::Upper, 1, 301, 1}), ConfigError);
}

TEST(Commands, BoundWritesCsv) {
  const auto dir = scratch_dir("bound");
  std::ostringstream log;
  const BoundReport r = cmd_bound(preset("paper-iv"), {dir, 1, &log});
  const auto lines = lines_of(dir / "bound.csv");
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0].rfind("# ", 0), 0u);
  EXPECT_EQ(lines[1], "beta1,beta2,beta3,j_star_star,gamma_lower,min_avs,max_hvs");
  EXPECT_NE(lines[2].find(num(r.j_star_star)), std::string::npos);
  EXPECT_NE(lines[2].find(",3,184"), std::string::npos);
}

TEST(Commands, SweepRecordsFailuresAndContinues) {
  ScenarioConfig c = preset("sweep-upper");
  c.sweep = {SweepScenario::Upper, 1, 3, 1};
  c.model.hv = {0.5, 2, 1};  // not worst case: every point fails
  const auto dir = scratch_dir("sweep");
  std::ostringstream log;
  const auto rows = cmd_sweep(c, {dir, 2, &log});
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) EXPECT_EQ(r.status, "not_worst_case");
  const auto lines = lines_of(dir / "sweep.csv");
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_EQ(lines[1], "sweep_value,j_star_star,floor_j_star_star,status");
  EXPECT_EQ(lines[2], "1,,,not_worst_case");
}

TEST(Commands, SimulateZeroPerturbation) {
  ScenarioConfig c = preset("paper-iv");
  c.platoon.n = 6;
  c.platoon.av = AvGains{0.01, 2, 0.01};
  c.simulation = {5.0, 0.01, 100, 0, 0.0};
  const auto dir = scratch_dir("sim");
  std::ostringstream log;
  (void)cmd_simulate(c, {dir, 1, &log});
  const auto lines = lines_of(dir / "traj.csv");
  ASSERT_EQ(lines.size(), 2u + 6u);
  EXPECT_EQ(lines[1], "t,y_1,y_2,y_3,y_4,y_5,y_6");
  for (std::size_t i = 2; i < lines.size(); ++i) {
    EXPECT_EQ(lines[i].substr(lines[i].find(',')), ",0,0,0,0,0,0");
  }
}
