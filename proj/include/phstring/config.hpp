#pragma once

// Scenario configuration: JSON loading with line-aware parse errors,
// exhaustive validation (all problems reported at once, each naming its
// field), serialization for the run manifest, and the translation into an
// assembled simulation problem.

#include <json.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "phstring/assembly.hpp"
#include "phstring/boundary.hpp"
#include "phstring/diagnostics.hpp"
#include "phstring/integrator.hpp"
#include "phstring/material.hpp"
#include "phstring/mesh.hpp"

namespace phstring {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> issues)
      : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

  const std::vector<std::string>& issues() const { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& issues) {
    std::ostringstream out;
    out << "invalid configuration:";
    for (const auto& issue : issues) out << "\n  - " << issue;
    return out.str();
  }
  std::vector<std::string> issues_;
};

struct GeometryConfig {
  double length = std::numeric_limits<double>::quiet_NaN();
  int elements = 0;
  int dimension = 0;
  std::vector<double> node_coords;  // optional nonuniform partition
};

struct PositionInit {
  enum class Kind { Line, Table };
  Kind kind = Kind::Line;
  Eigen::VectorXd start, end;          // Line: r(s) = start + s/L (end - start)
  std::vector<Eigen::VectorXd> table;  // Table: one entry per node
};

struct VelocityInit {
  enum class Kind { Constant, Table };
  Kind kind = Kind::Constant;
  Eigen::VectorXd value;
  std::vector<Eigen::VectorXd> table;
};

struct StrainInit {
  bool consistent = true;       // project from the initial positions
  Eigen::VectorXd values;       // explicit elementwise table otherwise
};

struct InitialConfig {
  PositionInit positions;
  VelocityInit velocities;
  StrainInit strains;
  bool allow_inconsistent = false;  // accept strain tables off the positions
};

struct TimeConfig {
  double step = std::numeric_limits<double>::quiet_NaN();     // h [s]
  double horizon = std::numeric_limits<double>::quiet_NaN();  // T [s]
};

struct SolverConfig {
  double newton_tol = 1e-11;
  int max_iterations = 25;
  Scheme scheme = Scheme::DiscreteGradient;
  JacobianMode jacobian = JacobianMode::Analytic;
};

struct OutputConfig {
  std::string directory = "output";
  int snapshot_stride = 1;
};

struct ScenarioConfig {
  GeometryConfig geometry;
  MaterialLaw material{MaterialKind::Hyperelastic,
                       std::numeric_limits<double>::quiet_NaN()};
  double linear_density = std::numeric_limits<double>::quiet_NaN();  // rhoA [kg/m]
  BodyForce body_force;
  BoundarySpec boundary;
  InitialConfig initial;
  TimeConfig time;
  SolverConfig solver;
  OutputConfig output;
};

namespace detail {

using nlohmann::json;

inline Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(j.size());
  int i = 0;
  for (const auto& x : j) v[i++] = x.get<double>();
  return v;
}

inline std::vector<Eigen::VectorXd> vector_list_from_json(const json& j) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(j.size());
  for (const auto& row : j) out.push_back(vector_from_json(row));
  return out;
}

inline json vector_to_json(const Eigen::VectorXd& v) {
  json j = json::array();
  for (int i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

inline json vector_list_to_json(const std::vector<Eigen::VectorXd>& list) {
  json j = json::array();
  for (const auto& v : list) j.push_back(vector_to_json(v));
  return j;
}

// Reports a structural problem (wrong type / missing required key) and
// returns whether the field is usable.
struct FieldReader {
  const json& root;
  std::vector<std::string>& issues;

  const json* find(const std::string& path) const {
    const json* node = &root;
    std::size_t begin = 0;
    while (begin <= path.size()) {
      const std::size_t dot = path.find('.', begin);
      const std::string key = path.substr(begin, dot == std::string::npos
                                                     ? std::string::npos
                                                     : dot - begin);
      if (!node->is_object() || !node->contains(key)) return nullptr;
      node = &(*node)[key];
      if (dot == std::string::npos) break;
      begin = dot + 1;
    }
    return node;
  }

  bool missing(const std::string& path) const { return find(path) == nullptr; }

  double number(const std::string& path, double fallback, bool required) {
    const json* node = find(path);
    if (node == nullptr) {
      if (required) issues.push_back(path + ": missing");
      return fallback;
    }
    if (!node->is_number()) {
      issues.push_back(path + ": expected a number");
      return fallback;
    }
    return node->get<double>();
  }

  int integer(const std::string& path, int fallback, bool required) {
    const json* node = find(path);
    if (node == nullptr) {
      if (required) issues.push_back(path + ": missing");
      return fallback;
    }
    if (!node->is_number_integer()) {
      issues.push_back(path + ": expected an integer");
      return fallback;
    }
    return node->get<int>();
  }

  std::string text(const std::string& path, std::string fallback, bool required) {
    const json* node = find(path);
    if (node == nullptr) {
      if (required) issues.push_back(path + ": missing");
      return fallback;
    }
    if (!node->is_string()) {
      issues.push_back(path + ": expected a string");
      return fallback;
    }
    return node->get<std::string>();
  }

  bool boolean(const std::string& path, bool fallback) {
    const json* node = find(path);
    if (node == nullptr) return fallback;
    if (!node->is_boolean()) {
      issues.push_back(path + ": expected a boolean");
      return fallback;
    }
    return node->get<bool>();
  }

  std::optional<Eigen::VectorXd> vector(const std::string& path, bool required) {
    const json* node = find(path);
    if (node == nullptr) {
      if (required) issues.push_back(path + ": missing");
      return std::nullopt;
    }
    if (!node->is_array()) {
      issues.push_back(path + ": expected an array of numbers");
      return std::nullopt;
    }
    for (const auto& x : *node) {
      if (!x.is_number()) {
        issues.push_back(path + ": expected an array of numbers");
        return std::nullopt;
      }
    }
    return vector_from_json(*node);
  }
};

inline InputSignal signal_from_json(const json& j, const std::string& path,
                                    std::vector<std::string>& issues) {
  InputSignal signal;
  FieldReader reader{j, issues};
  const std::string kind = reader.text("kind", "zero", true);
  if (kind == "zero") {
    signal.kind = InputSignal::Kind::Zero;
  } else if (kind == "half-sine-pulse") {
    signal.kind = InputSignal::Kind::HalfSinePulse;
    if (auto amp = reader.vector("amplitude", true)) signal.amplitude = *amp;
    signal.duration = reader.number("duration", 0.0, true);
  } else if (kind == "table") {
    signal.kind = InputSignal::Kind::PiecewiseTable;
    if (j.contains("times") && j["times"].is_array()) {
      for (const auto& t : j["times"]) signal.table.times.push_back(t.get<double>());
    } else {
      issues.push_back(path + ".times: missing or not an array");
    }
    if (j.contains("values") && j["values"].is_array()) {
      signal.table.values = vector_list_from_json(j["values"]);
    } else {
      issues.push_back(path + ".values: missing or not an array");
    }
  } else {
    issues.push_back(path + ".kind: unknown signal kind \"" + kind + "\"");
  }
  return signal;
}

inline json signal_to_json(const InputSignal& signal) {
  json j;
  switch (signal.kind) {
    case InputSignal::Kind::Zero:
      j["kind"] = "zero";
      break;
    case InputSignal::Kind::HalfSinePulse:
      j["kind"] = "half-sine-pulse";
      j["amplitude"] = vector_to_json(signal.amplitude);
      j["duration"] = signal.duration;
      break;
    case InputSignal::Kind::PiecewiseTable:
      j["kind"] = "table";
      j["times"] = signal.table.times;
      j["values"] = vector_list_to_json(signal.table.values);
      break;
  }
  return j;
}

inline EndCondition end_from_json(const json& j, const std::string& path,
                                  std::vector<std::string>& issues) {
  EndCondition end;
  FieldReader reader{j, issues};
  const std::string type = reader.text("type", "", true);
  if (type == "fixed") {
    end.type = EndCondition::Type::Fixed;
    if (auto pos = reader.vector("position", true)) end.position = *pos;
  } else if (type == "force") {
    end.type = EndCondition::Type::Force;
    if (j.contains("signal")) {
      end.signal = signal_from_json(j["signal"], path + ".signal", issues);
    } else {
      issues.push_back(path + ".signal: missing");
    }
  } else {
    issues.push_back(path + ".type: expected \"fixed\" or \"force\"");
  }
  return end;
}

inline json end_to_json(const EndCondition& end) {
  json j;
  if (end.type == EndCondition::Type::Fixed) {
    j["type"] = "fixed";
    j["position"] = vector_to_json(end.position);
  } else {
    j["type"] = "force";
    j["signal"] = signal_to_json(end.signal);
  }
  return j;
}

}  // namespace detail

// Structural read of a configuration; problems are collected into `issues`,
// never thrown. Follow with validate().
inline ScenarioConfig config_from_json(const nlohmann::json& j,
                                       std::vector<std::string>& issues) {
  using detail::FieldReader;
  ScenarioConfig cfg;
  FieldReader reader{j, issues};

  cfg.geometry.length = reader.number("geometry.length", cfg.geometry.length, true);
  cfg.geometry.elements = reader.integer("geometry.elements", 0, true);
  cfg.geometry.dimension = reader.integer("geometry.dimension", 0, true);
  if (!reader.missing("geometry.node_coords")) {
    if (auto coords = reader.vector("geometry.node_coords", false)) {
      cfg.geometry.node_coords.assign(coords->data(), coords->data() + coords->size());
    }
  }

  const std::string kind =
      reader.text("material.kind", "hyperelastic", true);
  try {
    cfg.material.kind = material_kind_from_string(kind);
  } catch (const std::invalid_argument&) {
    issues.push_back("material.kind: unknown material \"" + kind + "\"");
  }
  cfg.material.axial_stiffness =
      reader.number("material.EA", cfg.material.axial_stiffness, true);

  cfg.linear_density = reader.number("rhoA", cfg.linear_density, true);

  if (const auto* bf = reader.find("body_force")) {
    if (bf->is_array()) {
      cfg.body_force.constant = detail::vector_from_json(*bf);
    } else if (bf->is_object()) {
      PiecewiseLinearTable table;
      if (bf->contains("times") && (*bf)["times"].is_array()) {
        for (const auto& t : (*bf)["times"]) table.times.push_back(t.get<double>());
      } else {
        issues.push_back("body_force.times: missing or not an array");
      }
      if (bf->contains("values") && (*bf)["values"].is_array()) {
        table.values = detail::vector_list_from_json((*bf)["values"]);
      } else {
        issues.push_back("body_force.values: missing or not an array");
      }
      cfg.body_force.table = std::move(table);
    } else {
      issues.push_back("body_force: expected an array or a sample table");
    }
  }

  if (const auto* boundary = reader.find("boundary")) {
    if (boundary->contains("left")) {
      cfg.boundary.left = detail::end_from_json((*boundary)["left"], "boundary.left", issues);
    } else {
      issues.push_back("boundary.left: missing");
    }
    if (boundary->contains("right")) {
      cfg.boundary.right = detail::end_from_json((*boundary)["right"], "boundary.right", issues);
    } else {
      issues.push_back("boundary.right: missing");
    }
  } else {
    issues.push_back("boundary: missing");
  }

  if (const auto* init = reader.find("initial")) {
    if (init->contains("positions")) {
      const auto& p = (*init)["positions"];
      FieldReader preader{p, issues};
      const std::string pkind = preader.text("kind", "line", true);
      if (pkind == "line") {
        cfg.initial.positions.kind = PositionInit::Kind::Line;
        if (auto v = preader.vector("start", true)) cfg.initial.positions.start = *v;
        if (auto v = preader.vector("end", true)) cfg.initial.positions.end = *v;
      } else if (pkind == "table") {
        cfg.initial.positions.kind = PositionInit::Kind::Table;
        if (p.contains("values") && p["values"].is_array()) {
          cfg.initial.positions.table = detail::vector_list_from_json(p["values"]);
        } else {
          issues.push_back("initial.positions.values: missing or not an array");
        }
      } else {
        issues.push_back("initial.positions.kind: expected \"line\" or \"table\"");
      }
    } else {
      issues.push_back("initial.positions: missing");
    }
    if (init->contains("velocities")) {
      const auto& v = (*init)["velocities"];
      FieldReader vreader{v, issues};
      const std::string vkind = vreader.text("kind", "constant", true);
      if (vkind == "constant") {
        cfg.initial.velocities.kind = VelocityInit::Kind::Constant;
        if (auto val = vreader.vector("value", true)) cfg.initial.velocities.value = *val;
      } else if (vkind == "table") {
        cfg.initial.velocities.kind = VelocityInit::Kind::Table;
        if (v.contains("values") && v["values"].is_array()) {
          cfg.initial.velocities.table = detail::vector_list_from_json(v["values"]);
        } else {
          issues.push_back("initial.velocities.values: missing or not an array");
        }
      } else {
        issues.push_back("initial.velocities.kind: expected \"constant\" or \"table\"");
      }
    }
    if (init->contains("strains")) {
      const auto& s = (*init)["strains"];
      if (s.is_string() && s.get<std::string>() == "consistent") {
        cfg.initial.strains.consistent = true;
      } else if (s.is_array()) {
        cfg.initial.strains.consistent = false;
        cfg.initial.strains.values = detail::vector_from_json(s);
      } else {
        issues.push_back("initial.strains: expected \"consistent\" or an array");
      }
    }
    cfg.initial.allow_inconsistent =
        FieldReader{*init, issues}.boolean("allow_inconsistent", false);
  } else {
    issues.push_back("initial: missing");
  }

  cfg.time.step = reader.number("time.h", cfg.time.step, true);
  cfg.time.horizon = reader.number("time.T", cfg.time.horizon, true);

  cfg.solver.newton_tol = reader.number("solver.newton_tol", cfg.solver.newton_tol, false);
  cfg.solver.max_iterations =
      reader.integer("solver.max_iter", cfg.solver.max_iterations, false);
  const std::string scheme = reader.text("solver.scheme", "dg", false);
  try {
    cfg.solver.scheme = scheme_from_string(scheme);
  } catch (const std::invalid_argument&) {
    issues.push_back("solver.scheme: expected \"dg\" or \"midpoint\"");
  }
  const std::string jmode = reader.text("solver.jacobian", "analytic", false);
  try {
    cfg.solver.jacobian = jacobian_mode_from_string(jmode);
  } catch (const std::invalid_argument&) {
    issues.push_back("solver.jacobian: expected \"analytic\" or \"finite-difference\"");
  }

  cfg.output.directory = reader.text("output.directory", cfg.output.directory, false);
  cfg.output.snapshot_stride =
      reader.integer("output.snapshot_stride", cfg.output.snapshot_stride, false);

  return cfg;
}

inline nlohmann::json to_json(const ScenarioConfig& cfg) {
  using detail::vector_to_json;
  nlohmann::json j;
  j["geometry"]["length"] = cfg.geometry.length;
  j["geometry"]["elements"] = cfg.geometry.elements;
  j["geometry"]["dimension"] = cfg.geometry.dimension;
  if (!cfg.geometry.node_coords.empty()) {
    j["geometry"]["node_coords"] = cfg.geometry.node_coords;
  }
  j["material"]["kind"] = to_string(cfg.material.kind);
  j["material"]["EA"] = cfg.material.axial_stiffness;
  j["rhoA"] = cfg.linear_density;
  if (cfg.body_force.time_varying()) {
    j["body_force"]["times"] = cfg.body_force.table->times;
    j["body_force"]["values"] = detail::vector_list_to_json(cfg.body_force.table->values);
  } else {
    j["body_force"] = vector_to_json(cfg.body_force.constant);
  }
  j["boundary"]["left"] = detail::end_to_json(cfg.boundary.left);
  j["boundary"]["right"] = detail::end_to_json(cfg.boundary.right);
  if (cfg.initial.positions.kind == PositionInit::Kind::Line) {
    j["initial"]["positions"]["kind"] = "line";
    j["initial"]["positions"]["start"] = vector_to_json(cfg.initial.positions.start);
    j["initial"]["positions"]["end"] = vector_to_json(cfg.initial.positions.end);
  } else {
    j["initial"]["positions"]["kind"] = "table";
    j["initial"]["positions"]["values"] =
        detail::vector_list_to_json(cfg.initial.positions.table);
  }
  if (cfg.initial.velocities.kind == VelocityInit::Kind::Constant) {
    j["initial"]["velocities"]["kind"] = "constant";
    j["initial"]["velocities"]["value"] = vector_to_json(cfg.initial.velocities.value);
  } else {
    j["initial"]["velocities"]["kind"] = "table";
    j["initial"]["velocities"]["values"] =
        detail::vector_list_to_json(cfg.initial.velocities.table);
  }
  if (cfg.initial.strains.consistent) {
    j["initial"]["strains"] = "consistent";
  } else {
    j["initial"]["strains"] = vector_to_json(cfg.initial.strains.values);
  }
  if (cfg.initial.allow_inconsistent) j["initial"]["allow_inconsistent"] = true;
  j["time"]["h"] = cfg.time.step;
  j["time"]["T"] = cfg.time.horizon;
  j["solver"]["newton_tol"] = cfg.solver.newton_tol;
  j["solver"]["max_iter"] = cfg.solver.max_iterations;
  j["solver"]["scheme"] = to_string(cfg.solver.scheme);
  j["solver"]["jacobian"] = to_string(cfg.solver.jacobian);
  j["output"]["directory"] = cfg.output.directory;
  j["output"]["snapshot_stride"] = cfg.output.snapshot_stride;
  return j;
}

// Semantic validation; returns every violation, each naming the offending
// field.
inline std::vector<std::string> validate(const ScenarioConfig& cfg) {
  std::vector<std::string> issues;
  const int d = cfg.geometry.dimension;

  if (!(cfg.geometry.length > 0.0)) issues.push_back("geometry.length: must be positive");
  if (cfg.geometry.elements < 1) issues.push_back("geometry.elements: must be at least 1");
  if (d < 1 || d > 3) issues.push_back("geometry.dimension: must be 1, 2 or 3");
  if (!cfg.geometry.node_coords.empty()) {
    const auto& coords = cfg.geometry.node_coords;
    if (static_cast<int>(coords.size()) != cfg.geometry.elements + 1) {
      issues.push_back("geometry.node_coords: must list elements + 1 coordinates");
    } else {
      if (coords.front() != 0.0 || coords.back() != cfg.geometry.length) {
        issues.push_back("geometry.node_coords: must run from 0 to geometry.length");
      }
      for (std::size_t i = 1; i < coords.size(); ++i) {
        if (!(coords[i] > coords[i - 1])) {
          issues.push_back("geometry.node_coords: must be strictly increasing");
          break;
        }
      }
    }
  }

  if (!(cfg.material.axial_stiffness > 0.0)) {
    issues.push_back("material.EA: must be a positive number");
  }
  if (!(cfg.linear_density > 0.0)) issues.push_back("rhoA: must be a positive number");

  if (!cfg.body_force.time_varying() && cfg.body_force.constant.size() != 0 &&
      cfg.body_force.constant.size() != d) {
    issues.push_back("body_force: must have geometry.dimension components");
  }
  if (cfg.body_force.time_varying()) {
    const auto& table = *cfg.body_force.table;
    if (table.times.size() != table.values.size() || table.times.empty()) {
      issues.push_back("body_force: times and values must be non-empty and equally sized");
    }
    for (const auto& v : table.values) {
      if (v.size() != d) {
        issues.push_back("body_force.values: entries must have geometry.dimension components");
        break;
      }
    }
  }

  const auto check_end = [&](const EndCondition& end, const std::string& path) {
    if (end.type == EndCondition::Type::Fixed) {
      if (end.position.size() != d) {
        issues.push_back(path + ".position: must have geometry.dimension components");
      }
      return;
    }
    switch (end.signal.kind) {
      case InputSignal::Kind::Zero:
        break;
      case InputSignal::Kind::HalfSinePulse:
        if (end.signal.amplitude.size() != d) {
          issues.push_back(path + ".signal.amplitude: must have geometry.dimension components");
        }
        if (!(end.signal.duration > 0.0)) {
          issues.push_back(path + ".signal.duration: must be positive");
        }
        break;
      case InputSignal::Kind::PiecewiseTable: {
        const auto& table = end.signal.table;
        if (table.times.size() != table.values.size() || table.times.empty()) {
          issues.push_back(path + ".signal: times and values must be non-empty and equally sized");
        }
        for (std::size_t i = 1; i < table.times.size(); ++i) {
          if (!(table.times[i] > table.times[i - 1])) {
            issues.push_back(path + ".signal.times: must be strictly increasing");
            break;
          }
        }
        for (const auto& v : table.values) {
          if (v.size() != d) {
            issues.push_back(path + ".signal.values: entries must have geometry.dimension components");
            break;
          }
        }
        break;
      }
    }
  };
  check_end(cfg.boundary.left, "boundary.left");
  check_end(cfg.boundary.right, "boundary.right");

  const int n_nodes = cfg.geometry.elements + 1;
  if (cfg.initial.positions.kind == PositionInit::Kind::Line) {
    if (cfg.initial.positions.start.size() != d) {
      issues.push_back("initial.positions.start: must have geometry.dimension components");
    }
    if (cfg.initial.positions.end.size() != d) {
      issues.push_back("initial.positions.end: must have geometry.dimension components");
    }
  } else {
    if (static_cast<int>(cfg.initial.positions.table.size()) != n_nodes) {
      issues.push_back("initial.positions.values: must list one entry per node");
    }
    for (const auto& v : cfg.initial.positions.table) {
      if (v.size() != d) {
        issues.push_back("initial.positions.values: entries must have geometry.dimension components");
        break;
      }
    }
  }
  if (cfg.initial.velocities.kind == VelocityInit::Kind::Constant) {
    if (cfg.initial.velocities.value.size() != 0 &&
        cfg.initial.velocities.value.size() != d) {
      issues.push_back("initial.velocities.value: must have geometry.dimension components");
    }
  } else {
    if (static_cast<int>(cfg.initial.velocities.table.size()) != n_nodes) {
      issues.push_back("initial.velocities.values: must list one entry per node");
    }
    for (const auto& v : cfg.initial.velocities.table) {
      if (v.size() != d) {
        issues.push_back("initial.velocities.values: entries must have geometry.dimension components");
        break;
      }
    }
  }
  if (!cfg.initial.strains.consistent) {
    if (cfg.initial.strains.values.size() != cfg.geometry.elements) {
      issues.push_back("initial.strains: must list one entry per element");
    } else if (cfg.initial.strains.values.minCoeff() <= 0.0) {
      issues.push_back("initial.strains: entries must be positive");
    }
  }

  if (!(cfg.time.step > 0.0)) issues.push_back("time.h: must be a positive number");
  if (!(cfg.time.horizon >= 0.0)) issues.push_back("time.T: must be a nonnegative number");

  if (!(cfg.solver.newton_tol > 0.0)) issues.push_back("solver.newton_tol: must be positive");
  if (cfg.solver.max_iterations < 1) issues.push_back("solver.max_iter: must be at least 1");

  if (cfg.output.snapshot_stride < 1) {
    issues.push_back("output.snapshot_stride: must be at least 1");
  }
  return issues;
}

// Parse a configuration file; syntax errors carry the line, and all
// structural and semantic violations are reported together.
inline ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError({"cannot open " + path.string()});
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    std::size_t line = 1;
    const std::size_t stop = std::min(err.byte, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') ++line;
    }
    throw ConfigError({path.string() + ": parse error at line " + std::to_string(line) +
                       ": " + err.what()});
  }

  std::vector<std::string> issues;
  ScenarioConfig cfg = config_from_json(j, issues);
  auto semantic = validate(cfg);
  issues.insert(issues.end(), semantic.begin(), semantic.end());
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return cfg;
}

struct SimulationSetup {
  Mesh mesh;
  MaterialLaw law;
  SystemOperators ops;
  BoundarySpec boundary;
  State initial;
  StepSettings settings;
  double horizon = 0.0;
  OutputConfig output;
};

// Materialize a validated configuration into an assembled problem. Explicit
// strain tables must match the initial positions to 1e-12 unless the
// override flag is set.
inline SimulationSetup prepare(const ScenarioConfig& cfg) {
  {
    auto issues = validate(cfg);
    if (!issues.empty()) throw ConfigError(std::move(issues));
  }
  SimulationSetup setup;
  setup.mesh = cfg.geometry.node_coords.empty()
                   ? build_mesh(cfg.geometry.length, cfg.geometry.elements,
                                cfg.geometry.dimension)
                   : build_mesh(cfg.geometry.node_coords, cfg.geometry.dimension);
  setup.law = cfg.material;
  setup.boundary = cfg.boundary;

  BodyForce body = cfg.body_force;
  if (!body.time_varying() && body.constant.size() == 0) {
    body.constant = Eigen::VectorXd::Zero(setup.mesh.dimension);
  }
  setup.ops = assemble_system(setup.mesh, cfg.linear_density, body, setup.boundary);

  const Mesh& mesh = setup.mesh;
  const int d = mesh.dimension;
  State state;
  state.positions.resize(mesh.n_position_dofs());
  if (cfg.initial.positions.kind == PositionInit::Kind::Line) {
    for (int node = 0; node < mesh.n_nodes(); ++node) {
      const double w = mesh.node_coords[node] / mesh.length;
      state.positions.segment(mesh.dof(node, 0), d) =
          (1.0 - w) * cfg.initial.positions.start + w * cfg.initial.positions.end;
    }
  } else {
    for (int node = 0; node < mesh.n_nodes(); ++node) {
      state.positions.segment(mesh.dof(node, 0), d) = cfg.initial.positions.table[node];
    }
  }
  state.velocities.resize(mesh.n_position_dofs());
  if (cfg.initial.velocities.kind == VelocityInit::Kind::Constant) {
    Eigen::VectorXd value = cfg.initial.velocities.value;
    if (value.size() == 0) value = Eigen::VectorXd::Zero(d);
    for (int node = 0; node < mesh.n_nodes(); ++node) {
      state.velocities.segment(mesh.dof(node, 0), d) = value;
    }
  } else {
    for (int node = 0; node < mesh.n_nodes(); ++node) {
      state.velocities.segment(mesh.dof(node, 0), d) = cfg.initial.velocities.table[node];
    }
  }
  if (cfg.initial.strains.consistent) {
    state.strains = project_initial_strain(mesh, state.positions);
  } else {
    state.strains = cfg.initial.strains.values;
    if (!cfg.initial.allow_inconsistent) {
      State probe = state;
      const double defect = kinematic_consistency(probe, mesh);
      if (defect > 1e-12) {
        throw ConfigError(
            {"initial.strains: inconsistent with initial positions (defect " +
             std::to_string(defect) +
             "); set initial.allow_inconsistent to accept"});
      }
    }
  }

  // fixed ends must agree with the initial data they will pin
  std::vector<std::string> issues;
  for (const auto& end : dirichlet_ends(setup.boundary, mesh)) {
    const Eigen::VectorXd at = state.positions.segment(mesh.dof(end.node, 0), d);
    if ((at - end.position).norm() > 1e-12) {
      issues.push_back("boundary: fixed end at node " + std::to_string(end.node) +
                       " disagrees with the initial positions");
    }
    const Eigen::VectorXd vel = state.velocities.segment(mesh.dof(end.node, 0), d);
    if (vel.norm() > 1e-12) {
      issues.push_back("boundary: fixed end at node " + std::to_string(end.node) +
                       " requires zero initial velocity");
    }
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));

  setup.initial = std::move(state);
  setup.settings.step_size = cfg.time.step;
  setup.settings.newton_tol = cfg.solver.newton_tol;
  setup.settings.max_iterations = cfg.solver.max_iterations;
  setup.settings.scheme = cfg.solver.scheme;
  setup.settings.jacobian = cfg.solver.jacobian;
  setup.horizon = cfg.time.horizon;
  setup.output = cfg.output;
  return setup;
}

inline SimulationProblem make_problem(const SimulationSetup& setup) {
  return {setup.mesh,    setup.law,      setup.ops,    setup.boundary,
          setup.initial, setup.settings, setup.horizon};
}

// Assemble and run a scenario in one call.
inline Trajectory simulate(const ScenarioConfig& cfg) {
  return simulate(make_problem(prepare(cfg)));
}

}  // namespace phstring
