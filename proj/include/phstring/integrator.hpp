#pragma once

// One-step time integration of the semi-discrete port-Hamiltonian system
// E dx/dt = J(x) z + B u with state x = (r, v, C) and
//
//   E = blockdiag(I, M_rho, M_S),    J(x) = [  0    I     0    ]
//                                           [ -I    0   -2K(r) ]
//                                           [  0  2K(r)^T  0   ],
//
// advanced by E (x1 - x0) = h J(x_mid) z_mid + h B u_mid. The
// discrete-gradient scheme evaluates the strain effort through the secant
// slope of W, which makes the discrete energy balance exact; the implicit
// midpoint rule evaluates dW/dC at the midpoint strain instead. The
// nonlinear system is solved with Newton's method on the stacked residual.

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "phstring/assembly.hpp"
#include "phstring/boundary.hpp"
#include "phstring/material.hpp"
#include "phstring/mesh.hpp"

namespace phstring {

enum class Scheme { DiscreteGradient, Midpoint };
enum class JacobianMode { Analytic, FiniteDifference };

inline std::string to_string(Scheme scheme) {
  return scheme == Scheme::DiscreteGradient ? "dg" : "midpoint";
}

inline Scheme scheme_from_string(std::string_view name) {
  if (name == "dg") return Scheme::DiscreteGradient;
  if (name == "midpoint") return Scheme::Midpoint;
  throw std::invalid_argument("unknown scheme: " + std::string(name));
}

inline std::string to_string(JacobianMode mode) {
  return mode == JacobianMode::Analytic ? "analytic" : "finite-difference";
}

inline JacobianMode jacobian_mode_from_string(std::string_view name) {
  if (name == "analytic") return JacobianMode::Analytic;
  if (name == "finite-difference") return JacobianMode::FiniteDifference;
  throw std::invalid_argument("unknown jacobian mode: " + std::string(name));
}

struct StepSettings {
  double step_size = 1e-2;    // h [s]
  double newton_tol = 1e-11;  // on the Euclidean norm of the stacked residual
  int max_iterations = 25;
  Scheme scheme = Scheme::DiscreteGradient;
  JacobianMode jacobian = JacobianMode::Analytic;
};

struct StepReport {
  int iterations = 0;  // residual evaluations performed
  double final_residual_norm = 0.0;
  bool converged = false;
  std::string message;
};

namespace detail {

// Effort stress per element over the step: twice the secant slope of W for
// the discrete gradient, the midpoint stress for the midpoint rule.
inline Eigen::VectorXd effective_stress(const MaterialLaw& law,
                                        const Eigen::VectorXd& strains_prev,
                                        const Eigen::VectorXd& strains_next,
                                        Scheme scheme) {
  Eigen::VectorXd s(strains_prev.size());
  for (int e = 0; e < strains_prev.size(); ++e) {
    if (scheme == Scheme::DiscreteGradient) {
      s[e] = 2.0 * greenspan_derivative(law, strains_prev[e], strains_next[e]);
    } else {
      s[e] = stress(law, 0.5 * (strains_prev[e] + strains_next[e]));
    }
  }
  return s;
}

// d(effective stress)/d(strains_next), elementwise.
inline Eigen::VectorXd effective_stress_tangent(const MaterialLaw& law,
                                                const Eigen::VectorXd& strains_prev,
                                                const Eigen::VectorXd& strains_next,
                                                Scheme scheme) {
  Eigen::VectorXd ds(strains_prev.size());
  for (int e = 0; e < strains_prev.size(); ++e) {
    if (scheme == Scheme::DiscreteGradient) {
      ds[e] = 2.0 * greenspan_derivative_dnext(law, strains_prev[e], strains_next[e]);
    } else {
      ds[e] = 0.5 * stress_tangent(law, 0.5 * (strains_prev[e] + strains_next[e]));
    }
  }
  return ds;
}

}  // namespace detail

// Raw step residual E (x1 - x0) - h J(x_mid) z_mid - h B u_mid, with u
// sampled at t_n + h/2. Dirichlet constraints are applied separately. A
// nonpositive strain in either state throws std::domain_error; the Newton
// driver treats that as a step rejection.
inline Eigen::VectorXd step_residual(const State& state_prev, const State& state_next,
                                     const SystemOperators& ops, const MaterialLaw& law,
                                     const BoundarySpec& bc, double h, double t_n,
                                     Scheme scheme) {
  const Mesh& mesh = ops.mesh;
  const int nd = mesh.n_position_dofs();
  const int ne = mesh.n_elements;
  const double t_mid = t_n + 0.5 * h;

  const Eigen::VectorXd pos_mid = 0.5 * (state_prev.positions + state_next.positions);
  const Eigen::VectorXd vel_mid = 0.5 * (state_prev.velocities + state_next.velocities);
  const Eigen::VectorXd s_eff =
      detail::effective_stress(law, state_prev.strains, state_next.strains, scheme);
  const Eigen::MatrixXd coupling = ops.tangent_coupling(pos_mid);

  Eigen::VectorXd forces = ops.body_load_at(t_mid);
  const Eigen::VectorXd u = evaluate_input(bc, t_mid, mesh.dimension);
  add_boundary_forces(ops.input_map, mesh, u, forces);
  forces -= coupling * s_eff;

  Eigen::VectorXd res(state_dimension(mesh));
  res.segment(0, nd) = (state_next.positions - state_prev.positions) - h * vel_mid;
  res.segment(nd, nd) =
      ops.mass * (state_next.velocities - state_prev.velocities) - h * forces;
  res.segment(2 * nd, ne) =
      ops.strain_mass.cwiseProduct(state_next.strains - state_prev.strains) -
      2.0 * h * (coupling.transpose() * vel_mid);
  return res;
}

inline Eigen::VectorXd residual_dg(const State& state_prev, const State& state_next,
                                   const SystemOperators& ops, const MaterialLaw& law,
                                   const BoundarySpec& bc, double h, double t_n) {
  return step_residual(state_prev, state_next, ops, law, bc, h, t_n,
                       Scheme::DiscreteGradient);
}

inline Eigen::VectorXd residual_midpoint(const State& state_prev, const State& state_next,
                                         const SystemOperators& ops, const MaterialLaw& law,
                                         const BoundarySpec& bc, double h, double t_n) {
  return step_residual(state_prev, state_next, ops, law, bc, h, t_n, Scheme::Midpoint);
}

// E = blockdiag(I, M_rho, M_S); also the h -> 0 limit of the Newton
// Jacobian.
inline Eigen::MatrixXd system_matrix(const SystemOperators& ops) {
  const int nd = ops.mesh.n_position_dofs();
  const int n = state_dimension(ops.mesh);
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
  e.block(0, 0, nd, nd).setIdentity();
  e.block(nd, nd, nd, nd) = ops.mass;
  e.block(2 * nd, 2 * nd, ops.mesh.n_elements, ops.mesh.n_elements) =
      ops.strain_mass.asDiagonal();
  return e;
}

// d(step_residual)/d(state_next), either assembled analytically or by
// central finite differences with step 1e-7 (1 + |x_j|).
inline Eigen::MatrixXd newton_jacobian(const State& state_prev, const State& state_next,
                                       const SystemOperators& ops, const MaterialLaw& law,
                                       const BoundarySpec& bc, double h, double t_n,
                                       Scheme scheme,
                                       JacobianMode mode = JacobianMode::Analytic) {
  const Mesh& mesh = ops.mesh;
  const int nd = mesh.n_position_dofs();
  const int ne = mesh.n_elements;
  const int n = state_dimension(mesh);
  const int d = mesh.dimension;

  if (mode == JacobianMode::FiniteDifference) {
    Eigen::MatrixXd jac(n, n);
    Eigen::VectorXd x = pack_state(state_next);
    for (int j = 0; j < n; ++j) {
      const double dx = 1e-7 * (1.0 + std::abs(x[j]));
      Eigen::VectorXd xp = x, xm = x;
      xp[j] += dx;
      xm[j] -= dx;
      const Eigen::VectorXd rp = step_residual(state_prev, unpack_state(mesh, xp), ops,
                                               law, bc, h, t_n, scheme);
      const Eigen::VectorXd rm = step_residual(state_prev, unpack_state(mesh, xm), ops,
                                               law, bc, h, t_n, scheme);
      jac.col(j) = (rp - rm) / (2.0 * dx);
    }
    return jac;
  }

  const Eigen::VectorXd pos_mid = 0.5 * (state_prev.positions + state_next.positions);
  const Eigen::VectorXd vel_mid = 0.5 * (state_prev.velocities + state_next.velocities);
  const Eigen::VectorXd s_eff =
      detail::effective_stress(law, state_prev.strains, state_next.strains, scheme);
  const Eigen::VectorXd s_eff_d =
      detail::effective_stress_tangent(law, state_prev.strains, state_next.strains, scheme);

  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  jac.block(0, 0, nd, nd).setIdentity();
  jac.block(0, nd, nd, nd) = -0.5 * h * Eigen::MatrixXd::Identity(nd, nd);
  jac.block(nd, nd, nd, nd) = ops.mass;
  jac.block(2 * nd, 2 * nd, ne, ne) = ops.strain_mass.asDiagonal();

  for (int e = 0; e < ne; ++e) {
    const double len = mesh.elem_lengths[e];
    const Eigen::VectorXd tan_mid = element_difference(mesh, pos_mid, e) / len;
    const Eigen::VectorXd dvel_mid = element_difference(mesh, vel_mid, e) / len;
    for (int a = 0; a < 2; ++a) {
      const double sign_a = (a == 0) ? -1.0 : 1.0;
      const int row = mesh.dof(e + a, 0);
      // momentum rows: geometric part h/2 K(dr) S and material part
      // h K dS/dC1
      for (int b = 0; b < 2; ++b) {
        const double sign_b = (b == 0) ? -1.0 : 1.0;
        const double coef = 0.5 * h * sign_a * sign_b * s_eff[e] / len;
        for (int c = 0; c < d; ++c) {
          jac(nd + row + c, mesh.dof(e + b, c)) += coef;
        }
      }
      for (int c = 0; c < d; ++c) {
        jac(nd + row + c, 2 * nd + e) += h * sign_a * tan_mid[c] * s_eff_d[e];
        // strain row: -2h d(K^T v_mid)/d(r1, v1)
        jac(2 * nd + e, row + c) += -h * sign_a * dvel_mid[c];
        jac(2 * nd + e, nd + row + c) += -h * sign_a * tan_mid[c];
      }
    }
  }
  return jac;
}

// One Newton-solved time step from t_n to t_n + h, predictor state_next^0 =
// state_n. On convergence the returned state has its Dirichlet DOFs pinned
// bit-exactly. Non-convergence is reported, not thrown; the caller decides.
inline std::pair<State, StepReport> step(const State& state_n, const SystemOperators& ops,
                                         const MaterialLaw& law, const BoundarySpec& bc,
                                         const StepSettings& settings, double t_n) {
  if (!(settings.step_size > 0.0) || !(settings.newton_tol > 0.0) ||
      settings.max_iterations < 1) {
    throw std::invalid_argument("step: invalid settings");
  }
  const Mesh& mesh = ops.mesh;
  State trial = state_n;
  apply_dirichlet(trial, bc, mesh);

  const auto evaluate = [&](const State& s) {
    Eigen::VectorXd res = step_residual(state_n, s, ops, law, bc,
                                        settings.step_size, t_n, settings.scheme);
    apply_dirichlet(res, s, bc, mesh);
    return res;
  };
  // Newton update with the strain-positivity guard; returns false on a
  // singular system or when no admissible step length remains.
  const auto update = [&](State& s, const Eigen::VectorXd& res, std::string& error) {
    Eigen::MatrixXd jac = newton_jacobian(state_n, s, ops, law, bc,
                                          settings.step_size, t_n, settings.scheme,
                                          settings.jacobian);
    apply_dirichlet(jac, bc, mesh);
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
    const Eigen::VectorXd dx = lu.solve(-res);
    if (!dx.allFinite() || (jac * dx + res).norm() > 1e-6 * (1.0 + res.norm())) {
      error = "linear solve failed (singular Jacobian)";
      return false;
    }
    const Eigen::VectorXd x = pack_state(s);
    const int strain_offset = 2 * mesh.n_position_dofs();
    double alpha = 1.0;
    bool admissible = false;
    for (int cut = 0; cut < 40; ++cut) {
      const Eigen::VectorXd cand = x + alpha * dx;
      if (cand.segment(strain_offset, mesh.n_elements).minCoeff() > 0.0) {
        admissible = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!admissible) {
      error = "step rejected: could not keep strains positive";
      return false;
    }
    s = unpack_state(mesh, x + alpha * dx);
    apply_dirichlet(s, bc, mesh);
    return true;
  };

  StepReport report;
  for (int it = 1; it <= settings.max_iterations; ++it) {
    Eigen::VectorXd res = evaluate(trial);
    double norm = res.norm();
    report.iterations = it;
    report.final_residual_norm = norm;
    if (!std::isfinite(norm)) {
      report.message = "residual is not finite";
      return {trial, report};
    }
    if (norm < settings.newton_tol) {
      // one polishing update lands the accepted residual on the
      // quadratic-convergence floor; the conservation certificates inherit
      // whatever residual is accepted here
      if (norm > 0.0 && it < settings.max_iterations) {
        State polished = trial;
        std::string error;
        if (update(polished, res, error)) {
          const double polished_norm = evaluate(polished).norm();
          report.iterations = it + 1;
          if (std::isfinite(polished_norm) && polished_norm <= norm) {
            trial = std::move(polished);
            norm = polished_norm;
          }
        }
        report.final_residual_norm = norm;
      }
      report.converged = true;
      return {trial, report};
    }
    if (it == settings.max_iterations) break;
    std::string error;
    if (!update(trial, res, error)) {
      report.message = error;
      return {trial, report};
    }
  }
  report.message = "Newton did not converge within max_iterations";
  return {trial, report};
}

// Force exerted by each Dirichlet support over an accepted step, recovered
// from the unconstrained momentum rows at the fixed node. Ordered left
// before right; empty when no end is fixed.
inline Eigen::VectorXd reaction_force(const State& state_prev, const State& state_next,
                                      const SystemOperators& ops, const MaterialLaw& law,
                                      const BoundarySpec& bc, double h, double t_n,
                                      Scheme scheme) {
  const Mesh& mesh = ops.mesh;
  const auto ends = dirichlet_ends(bc, mesh);
  const int d = mesh.dimension;
  Eigen::VectorXd reactions(static_cast<int>(ends.size()) * d);
  if (ends.empty()) return reactions;
  const Eigen::VectorXd raw =
      step_residual(state_prev, state_next, ops, law, bc, h, t_n, scheme);
  const int nd = mesh.n_position_dofs();
  for (std::size_t k = 0; k < ends.size(); ++k) {
    reactions.segment(static_cast<int>(k) * d, d) =
        raw.segment(nd + mesh.dof(ends[k].node, 0), d) / h;
  }
  return reactions;
}

// Per-step port data: input, collocated output and Dirichlet reactions, all
// associated with the step midpoint.
struct PortSample {
  double t_mid = 0.0;
  Eigen::VectorXd input;
  Eigen::VectorXd output;
  Eigen::VectorXd reactions;
};

struct Trajectory {
  std::vector<double> times;        // n_steps + 1, starting at 0
  std::vector<State> states;        // matching times
  std::vector<StepReport> reports;  // one per attempted step
  std::vector<PortSample> ports;    // one per accepted step
  bool completed = false;
  int failure_step = -1;
  std::string failure_message;

  int n_steps() const { return static_cast<int>(ports.size()); }
};

struct SimulationProblem {
  Mesh mesh;
  MaterialLaw law;
  SystemOperators ops;
  BoundarySpec boundary;
  State initial;
  StepSettings settings;
  double horizon = 0.0;  // T [s]
};

// Advance from t = 0 to t = horizon in steps of the configured size; a
// trailing remainder shorter than a full step is taken as one short step.
// A failed step aborts and leaves the partial trajectory in place.
inline Trajectory simulate(const SimulationProblem& problem) {
  if (problem.horizon < 0.0) {
    throw std::invalid_argument("simulate: horizon must be nonnegative");
  }
  const double h = problem.settings.step_size;
  long n_full = static_cast<long>(std::floor(problem.horizon / h + 1e-9));
  double remainder = problem.horizon - static_cast<double>(n_full) * h;
  if (remainder < 1e-9 * h) remainder = 0.0;

  Trajectory traj;
  traj.times.push_back(0.0);
  State initial = problem.initial;
  apply_dirichlet(initial, problem.boundary, problem.mesh);
  traj.states.push_back(std::move(initial));

  const long n_steps = n_full + (remainder > 0.0 ? 1 : 0);
  for (long k = 0; k < n_steps; ++k) {
    const double hk = (k < n_full) ? h : remainder;
    const double t_n = traj.times.back();
    StepSettings local = problem.settings;
    local.step_size = hk;
    auto [next, report] = step(traj.states.back(), problem.ops, problem.law,
                               problem.boundary, local, t_n);
    traj.reports.push_back(report);
    if (!report.converged) {
      traj.failure_step = static_cast<int>(k);
      traj.failure_message = report.message.empty()
                                 ? "step did not converge"
                                 : report.message;
      return traj;
    }
    PortSample port;
    port.t_mid = t_n + 0.5 * hk;
    port.input = evaluate_input(problem.boundary, port.t_mid, problem.mesh.dimension);
    port.output = 0.5 * (extract_output(traj.states.back(), problem.boundary, problem.mesh) +
                         extract_output(next, problem.boundary, problem.mesh));
    port.reactions = reaction_force(traj.states.back(), next, problem.ops, problem.law,
                                    problem.boundary, hk, t_n, problem.settings.scheme);
    traj.ports.push_back(std::move(port));
    traj.times.push_back(t_n + hk);
    traj.states.push_back(std::move(next));
  }
  traj.completed = true;
  return traj;
}

}  // namespace phstring
