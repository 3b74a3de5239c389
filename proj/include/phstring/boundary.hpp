#pragma once

// Boundary data: per-end Dirichlet (fixed position) or Neumann (prescribed
// contact force) conditions, time signals for the force inputs, the
// selection map B from input slots to boundary DOFs, and the collocated
// velocity outputs.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "phstring/mesh.hpp"

namespace phstring {

// Piecewise-linear sample table; clamps to the end values outside the
// sampled range.
struct PiecewiseLinearTable {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> values;

  Eigen::VectorXd value_at(double t) const {
    if (times.empty() || times.size() != values.size()) {
      throw std::invalid_argument("table: times and values must be non-empty and equally sized");
    }
    if (t <= times.front()) return values.front();
    if (t >= times.back()) return values.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const auto k = static_cast<std::size_t>(it - times.begin());
    const double w = (t - times[k - 1]) / (times[k] - times[k - 1]);
    return (1.0 - w) * values[k - 1] + w * values[k];
  }
};

struct InputSignal {
  enum class Kind { Zero, HalfSinePulse, PiecewiseTable };

  Kind kind = Kind::Zero;
  Eigen::VectorXd amplitude;   // HalfSinePulse peak force [N]
  double duration = 0.0;       // HalfSinePulse support [0, duration]
  PiecewiseLinearTable table;

  // amplitude * sin(pi t / duration) on [0, duration], zero afterwards;
  // continuous at t = duration.
  Eigen::VectorXd evaluate(double t, int dimension) const {
    switch (kind) {
      case Kind::Zero:
        return Eigen::VectorXd::Zero(dimension);
      case Kind::HalfSinePulse:
        if (t >= 0.0 && t <= duration) {
          return amplitude * std::sin(std::numbers::pi * t / duration);
        }
        return Eigen::VectorXd::Zero(dimension);
      case Kind::PiecewiseTable:
        return table.value_at(t);
    }
    throw std::logic_error("unhandled signal kind");
  }
};

inline InputSignal zero_signal() { return {}; }

inline InputSignal half_sine_pulse(Eigen::VectorXd amplitude, double duration) {
  if (!(duration > 0.0)) {
    throw std::invalid_argument("half_sine_pulse: duration must be positive");
  }
  InputSignal s;
  s.kind = InputSignal::Kind::HalfSinePulse;
  s.amplitude = std::move(amplitude);
  s.duration = duration;
  return s;
}

struct EndCondition {
  enum class Type { Fixed, Force };

  Type type = Type::Force;
  Eigen::VectorXd position;  // Fixed: prescribed location, pinned for all time
  InputSignal signal;        // Force: prescribed contact force over time
};

inline EndCondition fixed_end(Eigen::VectorXd position) {
  EndCondition end;
  end.type = EndCondition::Type::Fixed;
  end.position = std::move(position);
  return end;
}

inline EndCondition force_end(InputSignal signal) {
  EndCondition end;
  end.type = EndCondition::Type::Force;
  end.signal = std::move(signal);
  return end;
}

struct BoundarySpec {
  EndCondition left;   // material coordinate s = 0
  EndCondition right;  // material coordinate s = L

  // Pure Neumann: no support anywhere, linear momentum only changes through
  // the force inputs.
  bool free_floating() const {
    return left.type == EndCondition::Type::Force &&
           right.type == EndCondition::Type::Force;
  }
  int n_neumann_ends() const {
    return (left.type == EndCondition::Type::Force ? 1 : 0) +
           (right.type == EndCondition::Type::Force ? 1 : 0);
  }
  int n_dirichlet_ends() const { return 2 - n_neumann_ends(); }
};

struct DirichletEnd {
  int node;                  // boundary node index
  Eigen::VectorXd position;  // prescribed location
};

// Fixed ends with their prescribed positions, left before right.
inline std::vector<DirichletEnd> dirichlet_ends(const BoundarySpec& bc, const Mesh& mesh) {
  std::vector<DirichletEnd> ends;
  if (bc.left.type == EndCondition::Type::Fixed) {
    ends.push_back({0, bc.left.position});
  }
  if (bc.right.type == EndCondition::Type::Fixed) {
    ends.push_back({mesh.n_elements, bc.right.position});
  }
  return ends;
}

// Selection map B from input slots to boundary velocity DOFs; each Neumann
// end occupies one d-sized slot, left before right.
struct InputMap {
  std::vector<int> nodes;

  int n_inputs(int dimension) const {
    return static_cast<int>(nodes.size()) * dimension;
  }
};

inline InputMap build_input_map(const BoundarySpec& bc, const Mesh& mesh) {
  InputMap map;
  if (bc.left.type == EndCondition::Type::Force) map.nodes.push_back(0);
  if (bc.right.type == EndCondition::Type::Force) map.nodes.push_back(mesh.n_elements);
  return map;
}

// Stacked force inputs u(t) for the Neumann ends, left before right.
// Dirichlet ends have no input slot.
inline Eigen::VectorXd evaluate_input(const BoundarySpec& bc, double t, int dimension) {
  std::vector<const InputSignal*> signals;
  if (bc.left.type == EndCondition::Type::Force) signals.push_back(&bc.left.signal);
  if (bc.right.type == EndCondition::Type::Force) signals.push_back(&bc.right.signal);
  Eigen::VectorXd u(static_cast<int>(signals.size()) * dimension);
  for (std::size_t k = 0; k < signals.size(); ++k) {
    u.segment(static_cast<int>(k) * dimension, dimension) = signals[k]->evaluate(t, dimension);
  }
  return u;
}

// Scatter B u into a position-DOF-sized force vector.
inline void add_boundary_forces(const InputMap& map, const Mesh& mesh,
                                const Eigen::VectorXd& u, Eigen::VectorXd& into) {
  const int d = mesh.dimension;
  if (u.size() != map.n_inputs(d)) {
    throw std::invalid_argument("add_boundary_forces: input size mismatch");
  }
  for (std::size_t k = 0; k < map.nodes.size(); ++k) {
    into.segment(mesh.dof(map.nodes[k], 0), d) += u.segment(static_cast<int>(k) * d, d);
  }
}

// Collocated output: boundary velocities at the Neumann ends, left before
// right.
inline Eigen::VectorXd extract_output(const State& state, const BoundarySpec& bc,
                                      const Mesh& mesh) {
  const int d = mesh.dimension;
  const InputMap map = build_input_map(bc, mesh);
  Eigen::VectorXd y(map.n_inputs(d));
  for (std::size_t k = 0; k < map.nodes.size(); ++k) {
    y.segment(static_cast<int>(k) * d, d) = state.velocities.segment(mesh.dof(map.nodes[k], 0), d);
  }
  return y;
}

// Pin constrained position/velocity DOFs to their prescribed values.
inline void apply_dirichlet(State& state, const BoundarySpec& bc, const Mesh& mesh) {
  const int d = mesh.dimension;
  for (const auto& end : dirichlet_ends(bc, mesh)) {
    if (end.position.size() != d) {
      throw std::invalid_argument("apply_dirichlet: prescribed position has wrong dimension");
    }
    state.positions.segment(mesh.dof(end.node, 0), d) = end.position;
    state.velocities.segment(mesh.dof(end.node, 0), d).setZero();
  }
}

// Replace constrained residual rows by the constraint equations of the trial
// state; the rows vanish exactly when the trial satisfies the constraints.
inline void apply_dirichlet(Eigen::VectorXd& residual, const State& trial,
                            const BoundarySpec& bc, const Mesh& mesh) {
  const int d = mesh.dimension;
  const int nd = mesh.n_position_dofs();
  for (const auto& end : dirichlet_ends(bc, mesh)) {
    const int base = mesh.dof(end.node, 0);
    residual.segment(base, d) =
        trial.positions.segment(base, d) - end.position;
    residual.segment(nd + base, d) = trial.velocities.segment(base, d);
  }
}

// Replace constrained Jacobian rows by unit rows.
inline void apply_dirichlet(Eigen::MatrixXd& jacobian, const BoundarySpec& bc,
                            const Mesh& mesh) {
  const int d = mesh.dimension;
  const int nd = mesh.n_position_dofs();
  for (const auto& end : dirichlet_ends(bc, mesh)) {
    const int base = mesh.dof(end.node, 0);
    for (int c = 0; c < d; ++c) {
      jacobian.row(base + c).setZero();
      jacobian(base + c, base + c) = 1.0;
      jacobian.row(nd + base + c).setZero();
      jacobian(nd + base + c, nd + base + c) = 1.0;
    }
  }
}

}  // namespace phstring
