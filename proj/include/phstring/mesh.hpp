#pragma once

// 1D material-domain mesh and the discrete state (nodal positions and
// velocities, elementwise strain). DOF ordering is node-major,
// component-minor: [r0x, r0y, r1x, r1y, ...].

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace phstring {

struct Mesh {
  double length = 0.0;               // L [m]
  int n_elements = 0;
  int dimension = 0;                 // spatial dimension d in {1, 2, 3}
  std::vector<double> node_coords;   // n_elements + 1 coordinates, 0 .. L
  std::vector<double> elem_lengths;  // n_elements, strictly positive

  int n_nodes() const { return n_elements + 1; }
  int n_position_dofs() const { return n_nodes() * dimension; }
  int dof(int node, int component) const { return node * dimension + component; }
};

inline Mesh build_mesh(std::vector<double> node_coords, int dimension) {
  if (dimension < 1 || dimension > 3) {
    throw std::invalid_argument("mesh: dimension must be 1, 2 or 3");
  }
  if (node_coords.size() < 2) {
    throw std::invalid_argument("mesh: need at least two nodes");
  }
  if (node_coords.front() != 0.0) {
    throw std::invalid_argument("mesh: node coordinates must start at 0");
  }
  Mesh mesh;
  mesh.dimension = dimension;
  mesh.n_elements = static_cast<int>(node_coords.size()) - 1;
  mesh.length = node_coords.back();
  mesh.node_coords = std::move(node_coords);
  if (!(mesh.length > 0.0)) {
    throw std::invalid_argument("mesh: length must be positive");
  }
  mesh.elem_lengths.resize(mesh.n_elements);
  for (int e = 0; e < mesh.n_elements; ++e) {
    const double len = mesh.node_coords[e + 1] - mesh.node_coords[e];
    if (!(len > 0.0)) {
      throw std::invalid_argument("mesh: node coordinates must be strictly increasing");
    }
    mesh.elem_lengths[e] = len;
  }
  return mesh;
}

// Uniform partition of [0, L] into n_elements pieces.
inline Mesh build_mesh(double length, int n_elements, int dimension) {
  if (!(length > 0.0)) {
    throw std::invalid_argument("mesh: length must be positive");
  }
  if (n_elements < 1) {
    throw std::invalid_argument("mesh: need at least one element");
  }
  std::vector<double> coords(n_elements + 1);
  for (int i = 0; i <= n_elements; ++i) {
    coords[i] = length * static_cast<double>(i) / static_cast<double>(n_elements);
  }
  coords.front() = 0.0;
  coords.back() = length;
  return build_mesh(std::move(coords), dimension);
}

// Discrete state: the stacked unknown of one time step is
// [positions; velocities; strains].
struct State {
  Eigen::VectorXd positions;   // n_nodes * d
  Eigen::VectorXd velocities;  // n_nodes * d
  Eigen::VectorXd strains;     // n_elements, entries must stay positive
};

inline int state_dimension(const Mesh& mesh) {
  return 2 * mesh.n_position_dofs() + mesh.n_elements;
}

inline Eigen::VectorXd pack_state(const State& state) {
  Eigen::VectorXd x(state.positions.size() + state.velocities.size() +
                    state.strains.size());
  x << state.positions, state.velocities, state.strains;
  return x;
}

inline State unpack_state(const Mesh& mesh, const Eigen::VectorXd& x) {
  const int nd = mesh.n_position_dofs();
  if (x.size() != state_dimension(mesh)) {
    throw std::invalid_argument("unpack_state: size mismatch");
  }
  State state;
  state.positions = x.segment(0, nd);
  state.velocities = x.segment(nd, nd);
  state.strains = x.segment(2 * nd, mesh.n_elements);
  return state;
}

// End-to-end difference of a nodal field over element e, as a d-vector.
inline Eigen::VectorXd element_difference(const Mesh& mesh,
                                          const Eigen::VectorXd& nodal, int e) {
  const int d = mesh.dimension;
  return nodal.segment((e + 1) * d, d) - nodal.segment(e * d, d);
}

}  // namespace phstring
