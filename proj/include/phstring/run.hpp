#pragma once

// Simulation driver: applies command-line overrides, runs the time loop and
// writes energy.csv, ports.csv, snapshots.csv plus a JSON run manifest with
// the resolved configuration and Newton statistics. Floats are written with
// 17 significant digits so the conservation certificates can be audited from
// the files alone.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "phstring/config.hpp"
#include "phstring/diagnostics.hpp"
#include "phstring/integrator.hpp"

namespace phstring {

struct RunOptions {
  std::optional<std::string> output_dir;
  std::optional<Scheme> scheme;
  std::optional<double> newton_tol;
  std::optional<int> steps_override;  // run exactly N steps of size time.h
  bool dry_run = false;
};

struct RunResult {
  int exit_code = 0;  // 0 ok, 1 invalid configuration, 2 solver failure
  std::string message;
  std::vector<std::string> warnings;
  std::filesystem::path output_directory;
  ScenarioConfig resolved;
  Trajectory trajectory;
  std::vector<EnergyRecord> energy;
};

inline ScenarioConfig apply_overrides(ScenarioConfig cfg, const RunOptions& options) {
  if (options.scheme) cfg.solver.scheme = *options.scheme;
  if (options.newton_tol) cfg.solver.newton_tol = *options.newton_tol;
  if (options.steps_override) {
    cfg.time.horizon = static_cast<double>(*options.steps_override) * cfg.time.step;
  }
  if (options.output_dir) cfg.output.directory = *options.output_dir;
  return cfg;
}

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline const char* component_name(int c) {
  constexpr const char* names[3] = {"x", "y", "z"};
  return names[c];
}

inline void write_energy_csv(const std::filesystem::path& path,
                             const std::vector<EnergyRecord>& records) {
  std::ofstream out(path);
  out << "t,H,T,V_int,V_ext,abs_increment,power_residual,kinematic_error\n";
  for (const auto& r : records) {
    out << format_double(r.t) << ',' << format_double(r.total) << ','
        << format_double(r.kinetic) << ',' << format_double(r.internal) << ','
        << format_double(r.external) << ',' << format_double(r.increment) << ','
        << format_double(r.power_residual) << ',' << format_double(r.kinematic_error)
        << '\n';
  }
}

inline void write_ports_csv(const std::filesystem::path& path, const Trajectory& traj,
                            const BoundarySpec& bc, const Mesh& mesh) {
  std::ofstream out(path);
  const int d = mesh.dimension;
  out << "t";
  const auto end_label = [](bool left) { return left ? "left" : "right"; };
  std::vector<bool> neumann_is_left;
  if (bc.left.type == EndCondition::Type::Force) neumann_is_left.push_back(true);
  if (bc.right.type == EndCondition::Type::Force) neumann_is_left.push_back(false);
  std::vector<bool> dirichlet_is_left;
  if (bc.left.type == EndCondition::Type::Fixed) dirichlet_is_left.push_back(true);
  if (bc.right.type == EndCondition::Type::Fixed) dirichlet_is_left.push_back(false);
  for (bool left : neumann_is_left) {
    for (int c = 0; c < d; ++c) out << ",u_" << end_label(left) << '_' << component_name(c);
  }
  for (bool left : neumann_is_left) {
    for (int c = 0; c < d; ++c) out << ",y_" << end_label(left) << '_' << component_name(c);
  }
  for (bool left : dirichlet_is_left) {
    for (int c = 0; c < d; ++c) {
      out << ",reaction_" << end_label(left) << '_' << component_name(c);
    }
  }
  out << '\n';
  for (const auto& port : traj.ports) {
    out << format_double(port.t_mid);
    for (int i = 0; i < port.input.size(); ++i) out << ',' << format_double(port.input[i]);
    for (int i = 0; i < port.output.size(); ++i) out << ',' << format_double(port.output[i]);
    for (int i = 0; i < port.reactions.size(); ++i) {
      out << ',' << format_double(port.reactions[i]);
    }
    out << '\n';
  }
}

inline void write_snapshots_csv(const std::filesystem::path& path, const Trajectory& traj,
                                const Mesh& mesh, int stride) {
  std::ofstream out(path);
  out << "t";
  for (int node = 0; node < mesh.n_nodes(); ++node) {
    for (int c = 0; c < mesh.dimension; ++c) {
      out << ",r" << node << '_' << component_name(c);
    }
  }
  out << '\n';
  const auto write_row = [&](std::size_t k) {
    out << format_double(traj.times[k]);
    for (int i = 0; i < traj.states[k].positions.size(); ++i) {
      out << ',' << format_double(traj.states[k].positions[i]);
    }
    out << '\n';
  };
  const std::size_t last = traj.states.size() - 1;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    if (k % static_cast<std::size_t>(stride) == 0 || k == last) write_row(k);
  }
}

}  // namespace detail

inline RunResult run(const ScenarioConfig& config_in, const RunOptions& options = {}) {
  RunResult result;
  result.resolved = apply_overrides(config_in, options);

  SimulationSetup setup;
  try {
    setup = prepare(result.resolved);
  } catch (const ConfigError& err) {
    result.exit_code = 1;
    result.message = err.what();
    return result;
  }

  if (result.resolved.body_force.time_varying()) {
    result.warnings.push_back(
        "body force is time-varying: the exact energy bookkeeping of the "
        "discrete-gradient step does not apply");
  }
  if (result.resolved.boundary.free_floating()) {
    result.warnings.push_back(
        "both ends carry force conditions: the string is free-floating");
  }

  if (options.dry_run) {
    result.message = "configuration valid (dry run, no output written)";
    return result;
  }

  const auto wall_start = std::chrono::steady_clock::now();
  result.trajectory = simulate(make_problem(setup));
  const double wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();

  result.energy = energy_records(result.trajectory, setup.ops, setup.law);

  const std::filesystem::path dir(result.resolved.output.directory);
  std::filesystem::create_directories(dir);
  result.output_directory = dir;
  detail::write_energy_csv(dir / "energy.csv", result.energy);
  detail::write_ports_csv(dir / "ports.csv", result.trajectory, setup.boundary, setup.mesh);
  detail::write_snapshots_csv(dir / "snapshots.csv", result.trajectory, setup.mesh,
                              result.resolved.output.snapshot_stride);

  int total_iterations = 0;
  int max_iterations = 0;
  double max_residual = 0.0;
  for (const auto& report : result.trajectory.reports) {
    total_iterations += report.iterations;
    max_iterations = std::max(max_iterations, report.iterations);
    max_residual = std::max(max_residual, report.final_residual_norm);
  }

  nlohmann::json manifest;
  manifest["config"] = to_json(result.resolved);
  manifest["scheme"] = to_string(result.resolved.solver.scheme);
  manifest["status"] = result.trajectory.completed ? "completed" : "failed";
  manifest["failure_step"] =
      result.trajectory.completed ? nlohmann::json(nullptr)
                                  : nlohmann::json(result.trajectory.failure_step);
  if (!result.trajectory.completed) {
    manifest["failure_message"] = result.trajectory.failure_message;
  }
  manifest["steps_taken"] = result.trajectory.n_steps();
  manifest["wall_time_seconds"] = wall_seconds;
  manifest["newton"]["total_iterations"] = total_iterations;
  manifest["newton"]["max_iterations"] = max_iterations;
  manifest["newton"]["max_final_residual"] = max_residual;
  manifest["free_floating"] = result.resolved.boundary.free_floating();
  manifest["time_varying_body_force"] = result.resolved.body_force.time_varying();
  manifest["warnings"] = result.warnings;
  manifest["outputs"] = {"energy.csv", "ports.csv", "snapshots.csv"};
  std::ofstream(dir / "manifest.json") << manifest.dump(2) << '\n';

  if (!result.trajectory.completed) {
    result.exit_code = 2;
    result.message = "solver failure at step " +
                     std::to_string(result.trajectory.failure_step) + ": " +
                     result.trajectory.failure_message;
  } else {
    result.message = "completed " + std::to_string(result.trajectory.n_steps()) +
                     " steps";
  }
  return result;
}

}  // namespace phstring
