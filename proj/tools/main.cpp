// Command-line driver: run a scenario from a JSON configuration or one of
// the built-in scenarios and write the CSV/manifest outputs.
//
// Exit codes: 0 success, 1 invalid configuration, 2 solver failure.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "phstring/phstring.hpp"

int main(int argc, char** argv) {
  CLI::App app{"phstring: energy-consistent dynamics of geometrically exact elastic strings"};

  std::string config_path;
  std::string scenario_name;
  std::string output_dir;
  std::string scheme_name;
  double newton_tol = 0.0;
  int steps_override = 0;
  bool dry_run = false;

  auto* config_opt =
      app.add_option("--config", config_path, "JSON scenario configuration file");
  auto* scenario_opt = app.add_option(
      "--scenario", scenario_name, "built-in scenario: pendulum, free-fall, static-hang");
  config_opt->excludes(scenario_opt);
  scenario_opt->excludes(config_opt);
  auto* output_opt =
      app.add_option("--output-dir", output_dir, "directory for the CSV and manifest files");
  auto* scheme_opt =
      app.add_option("--scheme", scheme_name, "time integration scheme")
          ->check(CLI::IsMember({"dg", "midpoint"}));
  auto* tol_opt =
      app.add_option("--newton-tol", newton_tol, "Newton residual tolerance override")
          ->check(CLI::PositiveNumber);
  auto* steps_opt =
      app.add_option("--steps-override", steps_override,
                     "run exactly N steps of the configured step size")
          ->check(CLI::PositiveNumber);
  app.add_flag("--dry-run", dry_run, "validate the configuration and write nothing");

  CLI11_PARSE(app, argc, argv);

  if (config_path.empty() == scenario_name.empty()) {
    std::cerr << "error: give exactly one of --config or --scenario\n";
    return 1;
  }

  phstring::ScenarioConfig config;
  try {
    if (!config_path.empty()) {
      config = phstring::load_config(config_path);
    } else {
      auto builtin = phstring::builtin_scenario(scenario_name);
      if (!builtin) {
        std::cerr << "error: unknown scenario \"" << scenario_name << "\" (available:";
        for (const auto& name : phstring::builtin_scenario_names()) std::cerr << ' ' << name;
        std::cerr << ")\n";
        return 1;
      }
      config = *builtin;
    }
  } catch (const phstring::ConfigError& err) {
    std::cerr << err.what() << '\n';
    return 1;
  }

  phstring::RunOptions options;
  options.dry_run = dry_run;
  if (*output_opt) options.output_dir = output_dir;
  if (*scheme_opt) options.scheme = phstring::scheme_from_string(scheme_name);
  if (*tol_opt) options.newton_tol = newton_tol;
  if (*steps_opt) options.steps_override = steps_override;

  const phstring::RunResult result = phstring::run(config, options);
  for (const auto& warning : result.warnings) {
    std::cerr << "warning: " << warning << '\n';
  }
  if (result.exit_code == 1) {
    std::cerr << result.message << '\n';
    return 1;
  }
  std::cout << result.message << '\n';
  if (!dry_run && result.exit_code == 0) {
    std::cout << "outputs in " << result.output_directory.string() << '\n';
    if (!result.energy.empty()) {
      double max_increment = 0.0;
      for (const auto& rec : result.energy) {
        max_increment = std::max(max_increment, rec.increment);
      }
      std::cout << "final H = " << result.energy.back().total
                << " J, max |dH| per step = " << max_increment << " J\n";
    }
  }
  return result.exit_code;
}
