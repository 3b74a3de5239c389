#pragma once

// Built-in scenario configurations.
//
//   pendulum:    2D rubber string pendulum. Fixed left end, half-sine force
//                pulse on the right end during [0, 0.2] s, gravity. EA = 20 N
//                and rhoA = 1 kg/m aggregate a circular rubber cross section
//                (E = 18400 N/m^2, rho = 920 kg/m^3, R = 0.0186 m).
//   free-fall:   single element in free fall; rigid translation, closed-form
//                trajectory.
//   static-hang: string hanging from a fixed top end, initialized at the
//                exact discrete equilibrium (per-element tension balances
//                the weight below the element).

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "phstring/config.hpp"

namespace phstring {

inline ScenarioConfig pendulum_scenario() {
  ScenarioConfig cfg;
  cfg.geometry = {1.0, 30, 2, {}};
  cfg.material = {MaterialKind::Hyperelastic, 20.0};
  cfg.linear_density = 1.0;
  cfg.body_force = constant_body_force(Eigen::Vector2d(0.0, -9.81));
  cfg.boundary.left = fixed_end(Eigen::Vector2d(0.0, 0.0));
  cfg.boundary.right = force_end(half_sine_pulse(Eigen::Vector2d(1.0, 1.0), 0.2));
  cfg.initial.positions.kind = PositionInit::Kind::Line;
  cfg.initial.positions.start = Eigen::Vector2d(0.0, 0.0);
  const double half_sqrt2 = std::sqrt(2.0) / 2.0;
  cfg.initial.positions.end = Eigen::Vector2d(half_sqrt2, -half_sqrt2);
  cfg.initial.velocities.kind = VelocityInit::Kind::Constant;
  cfg.initial.velocities.value = Eigen::Vector2d(0.0, 0.0);
  cfg.initial.strains.consistent = true;
  cfg.time = {1e-2, 1.0};
  cfg.solver = {1e-11, 25, Scheme::DiscreteGradient, JacobianMode::Analytic};
  cfg.output = {"output/pendulum", 1};
  return cfg;
}

inline ScenarioConfig free_fall_scenario() {
  ScenarioConfig cfg;
  cfg.geometry = {1.0, 1, 2, {}};
  cfg.material = {MaterialKind::Hyperelastic, 20.0};
  cfg.linear_density = 1.0;
  cfg.body_force = constant_body_force(Eigen::Vector2d(0.0, -9.81));
  cfg.boundary.left = force_end(zero_signal());
  cfg.boundary.right = force_end(zero_signal());
  cfg.initial.positions.kind = PositionInit::Kind::Line;
  cfg.initial.positions.start = Eigen::Vector2d(0.0, 0.0);
  cfg.initial.positions.end = Eigen::Vector2d(1.0, 0.0);
  cfg.initial.velocities.kind = VelocityInit::Kind::Constant;
  cfg.initial.velocities.value = Eigen::Vector2d(0.0, 0.0);
  cfg.initial.strains.consistent = true;
  cfg.time = {1e-2, 0.5};
  cfg.solver = {1e-11, 25, Scheme::DiscreteGradient, JacobianMode::Analytic};
  cfg.output = {"output/free-fall", 1};
  return cfg;
}

namespace detail {

// Stretch at which the tension reaches the target, by bisection; the laws
// are monotone in tension for stretches past 1.
inline double stretch_for_tension(const MaterialLaw& law, double target) {
  if (!(target > 0.0)) return 1.0;
  double lo = 1.0;
  double hi = 1.0 + target / law.axial_stiffness + 1.0;
  while (tension(law, hi) < target) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (tension(law, mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

inline ScenarioConfig static_hang_scenario() {
  ScenarioConfig cfg;
  cfg.geometry = {1.0, 8, 2, {}};
  cfg.material = {MaterialKind::Hyperelastic, 20.0};
  cfg.linear_density = 1.0;
  const double gravity = 9.81;
  cfg.body_force = constant_body_force(Eigen::Vector2d(0.0, -gravity));
  cfg.boundary.left = fixed_end(Eigen::Vector2d(0.0, 0.0));
  cfg.boundary.right = force_end(zero_signal());

  // Discrete equilibrium: cutting below element e, the element must carry
  // the consistent nodal weight underneath it, N(lambda_e) = rhoA g w_e with
  // w_e = L - s_{e+1} + l_e / 2.
  const Mesh mesh = build_mesh(cfg.geometry.length, cfg.geometry.elements, 2);
  std::vector<Eigen::VectorXd> nodes(mesh.n_nodes());
  nodes[0] = Eigen::Vector2d(0.0, 0.0);
  for (int e = 0; e < mesh.n_elements; ++e) {
    const double len = mesh.elem_lengths[e];
    const double weight_below =
        cfg.linear_density * gravity * (mesh.length - mesh.node_coords[e + 1] + 0.5 * len);
    const double stretch = detail::stretch_for_tension(cfg.material, weight_below);
    nodes[e + 1] = nodes[e] + Eigen::VectorXd(Eigen::Vector2d(0.0, -stretch * len));
  }
  cfg.initial.positions.kind = PositionInit::Kind::Table;
  cfg.initial.positions.table = std::move(nodes);
  cfg.initial.velocities.kind = VelocityInit::Kind::Constant;
  cfg.initial.velocities.value = Eigen::Vector2d(0.0, 0.0);
  cfg.initial.strains.consistent = true;
  cfg.time = {1e-2, 0.2};
  cfg.solver = {1e-11, 25, Scheme::DiscreteGradient, JacobianMode::Analytic};
  cfg.output = {"output/static-hang", 1};
  return cfg;
}

inline std::optional<ScenarioConfig> builtin_scenario(std::string_view name) {
  if (name == "pendulum") return pendulum_scenario();
  if (name == "free-fall") return free_fall_scenario();
  if (name == "static-hang") return static_hang_scenario();
  return std::nullopt;
}

inline std::vector<std::string> builtin_scenario_names() {
  return {"pendulum", "free-fall", "static-hang"};
}

}  // namespace phstring
