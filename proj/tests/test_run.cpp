#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "phstring/run.hpp"
#include "phstring/scenarios.hpp"

using namespace phstring;

namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

int count_lines(const std::string& text) {
  int lines = 0;
  for (char c : text) {
    if (c == '\n') ++lines;
  }
  return lines;
}

}  // namespace

TEST_CASE("free-fall run writes the expected files and matches the closed form") {
  const fs::path dir = fresh_dir("phstring_run_freefall");
  RunOptions options;
  options.output_dir = dir.string();
  const RunResult result = run(free_fall_scenario(), options);
  REQUIRE(result.exit_code == 0);
  CHECK(fs::exists(dir / "energy.csv"));
  CHECK(fs::exists(dir / "ports.csv"));
  CHECK(fs::exists(dir / "snapshots.csv"));
  CHECK(fs::exists(dir / "manifest.json"));

  // T = 0.5 at h = 0.01: 50 steps, 51 energy rows plus the header
  CHECK(count_lines(slurp(dir / "energy.csv")) == 52);
  CHECK(count_lines(slurp(dir / "ports.csv")) == 51);

  // rigid fall: y(t) = -g t^2 / 2 at both nodes, strains stay exactly 1
  const Trajectory& traj = result.trajectory;
  const double g = 9.81;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const double t = traj.times[k];
    const double expected_y = -0.5 * g * t * t;
    CHECK(traj.states[k].positions[1] == doctest::Approx(expected_y).epsilon(1e-12));
    CHECK(traj.states[k].positions[3] == doctest::Approx(expected_y).epsilon(1e-12));
    CHECK(traj.states[k].strains[0] == doctest::Approx(1.0).epsilon(1e-14));
  }
  fs::remove_all(dir);
}

TEST_CASE("two identical runs produce bit-identical CSV files") {
  ScenarioConfig cfg = pendulum_scenario();
  cfg.time.horizon = 0.05;
  cfg.geometry.elements = 8;

  const fs::path dir_a = fresh_dir("phstring_run_a");
  const fs::path dir_b = fresh_dir("phstring_run_b");
  RunOptions options;
  options.output_dir = dir_a.string();
  REQUIRE(run(cfg, options).exit_code == 0);
  options.output_dir = dir_b.string();
  REQUIRE(run(cfg, options).exit_code == 0);

  for (const char* name : {"energy.csv", "ports.csv", "snapshots.csv"}) {
    CHECK(slurp(dir_a / name) == slurp(dir_b / name));
  }
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST_CASE("manifest embeds a reloadable resolved configuration") {
  ScenarioConfig cfg = pendulum_scenario();
  cfg.time.horizon = 0.03;
  cfg.geometry.elements = 6;
  const fs::path dir = fresh_dir("phstring_run_manifest");
  RunOptions options;
  options.output_dir = dir.string();
  options.scheme = Scheme::Midpoint;
  options.newton_tol = 1e-10;
  const RunResult result = run(cfg, options);
  REQUIRE(result.exit_code == 0);

  const nlohmann::json manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["status"] == "completed");
  CHECK(manifest["scheme"] == "midpoint");
  CHECK(manifest["steps_taken"] == 3);
  CHECK(manifest["failure_step"].is_null());

  // the resolved config (with overrides applied) round-trips
  std::vector<std::string> issues;
  const ScenarioConfig reloaded = config_from_json(manifest["config"], issues);
  CHECK(issues.empty());
  CHECK(validate(reloaded).empty());
  CHECK(reloaded.solver.scheme == Scheme::Midpoint);
  CHECK(reloaded.solver.newton_tol == 1e-10);
  CHECK(to_json(reloaded) == manifest["config"]);
  fs::remove_all(dir);
}

TEST_CASE("steps override truncates the horizon") {
  const fs::path dir = fresh_dir("phstring_run_steps");
  RunOptions options;
  options.output_dir = dir.string();
  options.steps_override = 3;
  const RunResult result = run(pendulum_scenario(), options);
  REQUIRE(result.exit_code == 0);
  CHECK(result.trajectory.n_steps() == 3);
  CHECK(count_lines(slurp(dir / "energy.csv")) == 5);  // header + 4 states
  fs::remove_all(dir);
}

TEST_CASE("dry run validates without writing") {
  const fs::path dir = fresh_dir("phstring_run_dry");
  RunOptions options;
  options.output_dir = dir.string();
  options.dry_run = true;
  const RunResult result = run(pendulum_scenario(), options);
  CHECK(result.exit_code == 0);
  CHECK_FALSE(fs::exists(dir));

  ScenarioConfig broken = pendulum_scenario();
  broken.material.axial_stiffness = -1.0;
  const RunResult bad = run(broken, options);
  CHECK(bad.exit_code == 1);
  CHECK(bad.message.find("material.EA") != std::string::npos);
}

TEST_CASE("solver failure keeps partial outputs and reports the step") {
  ScenarioConfig cfg = pendulum_scenario();
  cfg.geometry.elements = 6;
  cfg.solver.newton_tol = 1e-30;  // unreachable
  cfg.solver.max_iterations = 3;
  const fs::path dir = fresh_dir("phstring_run_fail");
  RunOptions options;
  options.output_dir = dir.string();
  const RunResult result = run(cfg, options);
  CHECK(result.exit_code == 2);
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(fs::exists(dir / "energy.csv"));
  const nlohmann::json manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["status"] == "failed");
  CHECK(manifest["failure_step"] == 0);
  fs::remove_all(dir);
}

TEST_CASE("static hang reaction balances the total weight") {
  const fs::path dir = fresh_dir("phstring_run_hang");
  RunOptions options;
  options.output_dir = dir.string();
  const ScenarioConfig cfg = static_hang_scenario();
  const RunResult result = run(cfg, options);
  REQUIRE(result.exit_code == 0);
  // global static equilibrium: the support carries rhoA g L upward
  const double weight = cfg.linear_density * 9.81 * cfg.geometry.length;
  for (const auto& port : result.trajectory.ports) {
    REQUIRE(port.reactions.size() == 2);
    CHECK(port.reactions[0] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(port.reactions[1] == doctest::Approx(weight).epsilon(1e-9));
  }
  // and the state never moves
  for (const auto& state : result.trajectory.states) {
    CHECK((state.positions - result.trajectory.states.front().positions).norm() <= 1e-10);
  }
  fs::remove_all(dir);
}

TEST_CASE("time-varying body force emits a warning") {
  ScenarioConfig cfg = free_fall_scenario();
  PiecewiseLinearTable table;
  table.times = {0.0, 1.0};
  table.values = {Eigen::Vector2d(0.0, -9.81), Eigen::Vector2d(0.0, -4.0)};
  cfg.body_force.table = table;
  cfg.time.horizon = 0.02;
  const fs::path dir = fresh_dir("phstring_run_warn");
  RunOptions options;
  options.output_dir = dir.string();
  const RunResult result = run(cfg, options);
  REQUIRE(result.exit_code == 0);
  REQUIRE(!result.warnings.empty());
  CHECK(result.warnings.front().find("time-varying") != std::string::npos);
  const nlohmann::json manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["time_varying_body_force"] == true);
  fs::remove_all(dir);
}
