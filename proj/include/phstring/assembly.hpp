#pragma once

// Mixed finite element operators: C0-continuous linear Lagrangian ansatz for
// positions and velocities, elementwise-constant discontinuous ansatz for
// strain and stress. All integrals use two-point Gauss quadrature per
// element, which is exact for these ansatz spaces. Operators are stored
// dense; problem sizes stay at a few hundred DOFs.

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <stdexcept>
#include <string>

#include "phstring/boundary.hpp"
#include "phstring/material.hpp"
#include "phstring/mesh.hpp"

namespace phstring {

inline constexpr std::array<double, 2> kGaussPoints{-0.5773502691896257,
                                                    0.5773502691896257};
inline constexpr std::array<double, 2> kGaussWeights{1.0, 1.0};

// Linear shape functions on the reference element [-1, 1].
inline double shape_function(int a, double xi) {
  return a == 0 ? 0.5 * (1.0 - xi) : 0.5 * (1.0 + xi);
}

// Consistent mass matrix; per element and spatial component the 2x2 block is
// (rhoA l / 6) [[2, 1], [1, 2]].
inline Eigen::MatrixXd assemble_mass(const Mesh& mesh, double linear_density) {
  if (!(linear_density > 0.0)) {
    throw std::invalid_argument("assemble_mass: rhoA must be positive");
  }
  const int d = mesh.dimension;
  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(mesh.n_position_dofs(), mesh.n_position_dofs());
  for (int e = 0; e < mesh.n_elements; ++e) {
    const double jac = 0.5 * mesh.elem_lengths[e];
    for (int g = 0; g < 2; ++g) {
      const double xi = kGaussPoints[g];
      const double wj = kGaussWeights[g] * jac * linear_density;
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          const double coef = wj * shape_function(a, xi) * shape_function(b, xi);
          for (int c = 0; c < d; ++c) {
            mass(mesh.dof(e + a, c), mesh.dof(e + b, c)) += coef;
          }
        }
      }
    }
  }
  return mass;
}

// Diagonal of the strain mass matrix; the constant ansatz integrates to the
// element length.
inline Eigen::VectorXd assemble_strain_mass(const Mesh& mesh) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(mesh.n_elements);
  for (int e = 0; e < mesh.n_elements; ++e) {
    const double jac = 0.5 * mesh.elem_lengths[e];
    for (int g = 0; g < 2; ++g) {
      diag[e] += kGaussWeights[g] * jac;
    }
  }
  return diag;
}

// Consistent nodal load of a spatially constant force per unit length; each
// element contributes b l / 2 to both of its nodes.
inline Eigen::VectorXd assemble_body_force(const Mesh& mesh,
                                           const Eigen::VectorXd& force_per_length) {
  const int d = mesh.dimension;
  if (force_per_length.size() != d) {
    throw std::invalid_argument("assemble_body_force: force dimension mismatch");
  }
  Eigen::VectorXd load = Eigen::VectorXd::Zero(mesh.n_position_dofs());
  for (int e = 0; e < mesh.n_elements; ++e) {
    const double jac = 0.5 * mesh.elem_lengths[e];
    for (int g = 0; g < 2; ++g) {
      const double xi = kGaussPoints[g];
      for (int a = 0; a < 2; ++a) {
        const double coef = kGaussWeights[g] * jac * shape_function(a, xi);
        load.segment(mesh.dof(e + a, 0), d) += coef * force_per_length;
      }
    }
  }
  return load;
}

// Coupling operator K(r), size (n_nodes d) x n_elements; column e carries
// the element contribution [-dr_e / l_e; +dr_e / l_e] at the element's two
// nodes. Linear in the positions.
inline Eigen::MatrixXd assemble_tangent_coupling(const Mesh& mesh,
                                                 const Eigen::VectorXd& positions) {
  const int d = mesh.dimension;
  if (positions.size() != mesh.n_position_dofs()) {
    throw std::invalid_argument("assemble_tangent_coupling: position size mismatch");
  }
  Eigen::MatrixXd coupling = Eigen::MatrixXd::Zero(mesh.n_position_dofs(), mesh.n_elements);
  for (int e = 0; e < mesh.n_elements; ++e) {
    const double len = mesh.elem_lengths[e];
    const Eigen::VectorXd tangent = element_difference(mesh, positions, e) / len;
    const double jac = 0.5 * len;
    for (int g = 0; g < 2; ++g) {
      for (int a = 0; a < 2; ++a) {
        const double grad = (a == 0 ? -1.0 : 1.0) / len;  // d(shape)/ds
        const double coef = kGaussWeights[g] * jac * grad;
        for (int c = 0; c < d; ++c) {
          coupling(mesh.dof(e + a, c), e) += coef * tangent[c];
        }
      }
    }
  }
  return coupling;
}

// Elementwise strain of a nodal position field, C_e = |dr_e / l_e|^2. Exact
// for the linear ansatz since d_s r is constant per element.
inline Eigen::VectorXd project_initial_strain(const Mesh& mesh,
                                              const Eigen::VectorXd& positions) {
  if (positions.size() != mesh.n_position_dofs()) {
    throw std::invalid_argument("project_initial_strain: position size mismatch");
  }
  Eigen::VectorXd strains(mesh.n_elements);
  for (int e = 0; e < mesh.n_elements; ++e) {
    const Eigen::VectorXd tangent = element_difference(mesh, positions, e) / mesh.elem_lengths[e];
    strains[e] = tangent.squaredNorm();
    if (!(strains[e] > 0.0)) {
      throw std::domain_error("project_initial_strain: degenerate element " +
                              std::to_string(e) + " (coincident nodes give C = 0)");
    }
  }
  return strains;
}

// Integral of W(C^h) over the string, evaluated with the same two-point
// Gauss rule as the operators.
inline double stored_energy_integral(const Mesh& mesh, const MaterialLaw& law,
                                     const Eigen::VectorXd& strains) {
  if (strains.size() != mesh.n_elements) {
    throw std::invalid_argument("stored_energy_integral: strain size mismatch");
  }
  double total = 0.0;
  for (int e = 0; e < mesh.n_elements; ++e) {
    const double jac = 0.5 * mesh.elem_lengths[e];
    for (int g = 0; g < 2; ++g) {
      total += kGaussWeights[g] * jac * stored_energy_density(law, strains[e]);
    }
  }
  return total;
}

// Body force per unit length; constant by default, optionally time-varying
// through a sample table. A time-varying body force voids the exact energy
// bookkeeping of the discrete-gradient step.
struct BodyForce {
  Eigen::VectorXd constant;
  std::optional<PiecewiseLinearTable> table;

  bool time_varying() const { return table.has_value(); }

  Eigen::VectorXd value_at(double t) const {
    if (table) return table->value_at(t);
    return constant;
  }
};

inline BodyForce constant_body_force(Eigen::VectorXd value) {
  BodyForce b;
  b.constant = std::move(value);
  return b;
}

// Assembled semi-discrete operators. The coupling operator depends on the
// positions and is assembled on demand.
struct SystemOperators {
  Mesh mesh;
  Eigen::MatrixXd mass;         // symmetric positive definite
  Eigen::VectorXd strain_mass;  // diagonal entries, equal to element lengths
  Eigen::VectorXd body_load;    // consistent load of the (t = 0) body force
  BodyForce body_force;
  InputMap input_map;

  Eigen::MatrixXd tangent_coupling(const Eigen::VectorXd& positions) const {
    return assemble_tangent_coupling(mesh, positions);
  }

  Eigen::VectorXd body_load_at(double t) const {
    if (!body_force.time_varying()) return body_load;
    return assemble_body_force(mesh, body_force.value_at(t));
  }
};

inline SystemOperators assemble_system(const Mesh& mesh, double linear_density,
                                       BodyForce body_force, const BoundarySpec& bc) {
  SystemOperators ops;
  ops.mesh = mesh;
  ops.mass = assemble_mass(mesh, linear_density);
  ops.strain_mass = assemble_strain_mass(mesh);
  if (body_force.constant.size() == 0) {
    body_force.constant = Eigen::VectorXd::Zero(mesh.dimension);
  }
  ops.body_force = std::move(body_force);
  ops.body_load = assemble_body_force(mesh, ops.body_force.value_at(0.0));
  ops.input_map = build_input_map(bc, mesh);
  return ops;
}

}  // namespace phstring
