#pragma once

// Energy bookkeeping and structure-preservation certificates: discrete
// Hamiltonian decomposition, per-step power balance, directionality of the
// discrete derivative, kinematic consistency of the strain field,
// skew-symmetry probes and linear momentum.

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

#include "phstring/assembly.hpp"
#include "phstring/integrator.hpp"
#include "phstring/material.hpp"
#include "phstring/mesh.hpp"

namespace phstring {

struct EnergyBreakdown {
  double total = 0.0;     // H
  double kinetic = 0.0;   // 1/2 v^T M_rho v
  double internal = 0.0;  // integral of W(C^h)
  double external = 0.0;  // -r^T F_b
};

inline EnergyBreakdown hamiltonian(const State& state, const SystemOperators& ops,
                                   const MaterialLaw& law, double t = 0.0) {
  EnergyBreakdown e;
  e.kinetic = 0.5 * state.velocities.dot(ops.mass * state.velocities);
  e.internal = stored_energy_integral(ops.mesh, law, state.strains);
  e.external = -state.positions.dot(ops.body_load_at(t));
  e.total = e.kinetic + e.internal + e.external;
  return e;
}

// |H_next - H_prev - h u_mid . y_mid|, the defect in the discrete power
// balance over one step.
inline double power_balance_residual(double energy_prev, double energy_next,
                                     const Eigen::VectorXd& input_mid,
                                     const Eigen::VectorXd& output_mid,
                                     double step_size) {
  return std::abs(energy_next - energy_prev - step_size * input_mid.dot(output_mid));
}

// Defect in the directionality identity: the discrete derivative of H
// contracted with the state increment must reproduce the energy increment
// exactly (for a constant body force).
inline double directionality_check(const State& state_prev, const State& state_next,
                                   const SystemOperators& ops, const MaterialLaw& law) {
  const Eigen::VectorXd vel_mid = 0.5 * (state_prev.velocities + state_next.velocities);
  double lhs = -ops.body_load.dot(state_next.positions - state_prev.positions);
  lhs += (ops.mass * vel_mid).dot(state_next.velocities - state_prev.velocities);
  for (int e = 0; e < ops.mesh.n_elements; ++e) {
    lhs += ops.strain_mass[e] *
           greenspan_derivative(law, state_prev.strains[e], state_next.strains[e]) *
           (state_next.strains[e] - state_prev.strains[e]);
  }
  const double rhs = hamiltonian(state_next, ops, law).total -
                     hamiltonian(state_prev, ops, law).total;
  return std::abs(lhs - rhs);
}

// Worst elementwise defect of C_e = |dr_e / l_e|^2.
inline double kinematic_consistency(const State& state, const Mesh& mesh) {
  double worst = 0.0;
  for (int e = 0; e < mesh.n_elements; ++e) {
    const Eigen::VectorXd tangent =
        element_difference(mesh, state.positions, e) / mesh.elem_lengths[e];
    worst = std::max(worst, std::abs(state.strains[e] - tangent.squaredNorm()));
  }
  return worst;
}

// max over random probes z of |z . J z| / (1 + |z|^2). The two coupling
// blocks can be passed separately so tests can inject a perturbed operator
// into one of them.
inline double skew_symmetry_check(const Eigen::MatrixXd& coupling_momentum,
                                  const Eigen::MatrixXd& coupling_strain,
                                  int n_samples = 100, unsigned seed = 0x5eedu) {
  const int nd = static_cast<int>(coupling_momentum.rows());
  const int ne = static_cast<int>(coupling_momentum.cols());
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const auto draw = [&](int size) {
    Eigen::VectorXd v(size);
    for (int i = 0; i < size; ++i) v[i] = unif(rng);
    return v;
  };
  double worst = 0.0;
  for (int k = 0; k < n_samples; ++k) {
    const Eigen::VectorXd z_r = draw(nd);
    const Eigen::VectorXd z_v = draw(nd);
    const Eigen::VectorXd z_c = draw(ne);
    double dot = z_r.dot(z_v);
    dot += z_v.dot(-z_r - 2.0 * (coupling_momentum * z_c));
    dot += z_c.dot(2.0 * (coupling_strain.transpose() * z_v));
    const double scale = 1.0 + z_r.squaredNorm() + z_v.squaredNorm() + z_c.squaredNorm();
    worst = std::max(worst, std::abs(dot) / scale);
  }
  return worst;
}

inline double skew_symmetry_check(const State& state, const SystemOperators& ops,
                                  int n_samples = 100, unsigned seed = 0x5eedu) {
  const Eigen::MatrixXd coupling = ops.tangent_coupling(state.positions);
  return skew_symmetry_check(coupling, coupling, n_samples, seed);
}

// Total linear momentum per spatial component, 1_c^T M_rho v.
inline Eigen::VectorXd linear_momentum(const State& state, const SystemOperators& ops) {
  const Mesh& mesh = ops.mesh;
  const Eigen::VectorXd mv = ops.mass * state.velocities;
  Eigen::VectorXd momentum = Eigen::VectorXd::Zero(mesh.dimension);
  for (int node = 0; node < mesh.n_nodes(); ++node) {
    momentum += mv.segment(mesh.dof(node, 0), mesh.dimension);
  }
  return momentum;
}

// One row per trajectory state.
struct EnergyRecord {
  double t = 0.0;
  double total = 0.0;
  double kinetic = 0.0;
  double internal = 0.0;
  double external = 0.0;
  double increment = 0.0;        // |H_k - H_{k-1}|, 0 for the first row
  double power_residual = 0.0;   // power-balance defect of the step ending here
  double kinematic_error = 0.0;
};

inline std::vector<EnergyRecord> energy_records(const Trajectory& traj,
                                                const SystemOperators& ops,
                                                const MaterialLaw& law) {
  std::vector<EnergyRecord> records;
  records.reserve(traj.states.size());
  double prev_total = 0.0;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const EnergyBreakdown e = hamiltonian(traj.states[k], ops, law, traj.times[k]);
    EnergyRecord rec;
    rec.t = traj.times[k];
    rec.total = e.total;
    rec.kinetic = e.kinetic;
    rec.internal = e.internal;
    rec.external = e.external;
    rec.kinematic_error = kinematic_consistency(traj.states[k], ops.mesh);
    if (k > 0) {
      rec.increment = std::abs(e.total - prev_total);
      const double h = traj.times[k] - traj.times[k - 1];
      rec.power_residual = power_balance_residual(
          prev_total, e.total, traj.ports[k - 1].input, traj.ports[k - 1].output, h);
    }
    prev_total = e.total;
    records.push_back(rec);
  }
  return records;
}

}  // namespace phstring
