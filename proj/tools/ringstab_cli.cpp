// ringstab: penetration bounds, sweeps, spectra, simulation and placement
// for mixed human/autonomous rings.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "ringstab/cli/commands.hpp"
#include "ringstab/cli/scenario.hpp"

namespace {

constexpr const char* kPresetHelp =
    "Built-in scenarios (a --config file is applied on top):\n"
    "  paper-iv     hv = (0.3 pi, 1.5, 0.9), gain box [0.01, 2]^3, 400 HVs, 185-vehicle ring with one AV\n"
    "  appendix-g   gain box [0.8, 2]^3, 5 AVs / 27 HVs, 32-vehicle ring, greedy placement\n"
    "  sweep-upper  paper-iv with the upper-bound sweep beta_upper = (i, i, i), i = 1..300\n"
    "  sweep-lower  paper-iv with the lower-bound sweep beta_lower = 10^((i - 301) / 25) (1, 1, 1), i = 1..301\n";

}  // namespace

int main(int argc, char** argv) {
  using namespace ringstab;
  using namespace ringstab::cli;

  CLI::App app{"Mixed-autonomy ring string stability toolkit"};
  app.footer(kPresetHelp);
  app.require_subcommand(1);

  std::string config_path;
  std::string preset_name;
  std::optional<std::string> output_dir;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "TOML scenario file");
    sub->add_option("--preset", preset_name, "Built-in scenario: paper-iv, appendix-g, sweep-upper, sweep-lower");
    sub->add_option("--output-dir", output_dir, "Directory for output files (default ./out)");
    sub->add_option("--jobs", jobs, "Worker threads for sweeps")->check(CLI::PositiveNumber);
    sub->footer(kPresetHelp);
  };

  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {"bound", "Optimal AV penetration bound (bound.csv)"},
      {"sweep", "Bound sweep over the upper or lower gain bound (sweep.csv)"},
      {"eig", "Ring eigenmodes and string-stability verdict (eig.csv)"},
      {"simulate", "Linear response to a single position perturbation (traj.csv)"},
      {"place", "Greedy AV placement by the window-norm measure (place.txt)"},
      {"vstar", "Fewest AVs via peak-gain bisection (vstar.txt)"},
  };
  for (const auto& s : subs) add_common(app.add_subcommand(s.name, s.help));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  ScenarioConfig cfg;
  try {
    if (config_path.empty() && preset_name.empty()) {
      throw ConfigError("either --config or --preset is required");
    }
    if (!preset_name.empty()) cfg = preset(preset_name);
    if (!config_path.empty()) apply_toml_file(cfg, config_path);
    if (output_dir) cfg.output_dir = *output_dir;
    cfg.validate();
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }

  RunOptions opt;
  opt.output_dir = cfg.output_dir;
  opt.jobs = jobs;

  try {
    if (command == "bound") {
      (void)cmd_bound(cfg, opt);
    } else if (command == "sweep") {
      (void)cmd_sweep(cfg, opt);
    } else if (command == "eig") {
      (void)cmd_eig(cfg, opt);
    } else if (command == "simulate") {
      (void)cmd_simulate(cfg, opt);
    } else if (command == "place") {
      (void)cmd_place(cfg, opt);
    } else if (command == "vstar") {
      (void)cmd_vstar(cfg, opt);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const InfeasibleBoundsError& e) {
    std::cerr << "infeasible gain bounds: " << e.what() << '\n';
    return kInfeasible;
  } catch (const NotWorstCaseError& e) {
    std::cerr << "not a worst-case scenario: " << e.what() << '\n';
    return kNotWorstCase;
  } catch (const std::exception& e) {
    std::cerr << "computation failed: " << e.what() << '\n';
    return kComputeFailure;
  }
  return kOk;
}
