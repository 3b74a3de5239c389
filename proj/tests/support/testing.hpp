#pragma once

// Shared helpers for the test suites.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <random>

#include "phstring/mesh.hpp"

namespace testing {

// |a - b| within `ulps` units of machine epsilon at the larger magnitude
// (floored at 1).
inline bool close_ulps(double a, double b, double ulps) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= ulps * std::numeric_limits<double>::epsilon() * scale;
}

inline double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

inline double rel_matrix_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double scale = std::max(1e-30, std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()));
  return max_abs_diff(a, b) / scale;
}

inline Eigen::VectorXd random_vector(std::mt19937& rng, int size, double lo, double hi) {
  std::uniform_real_distribution<double> unif(lo, hi);
  Eigen::VectorXd v(size);
  for (int i = 0; i < size; ++i) v[i] = unif(rng);
  return v;
}

// Random admissible state: positions and velocities in [-1, 1], strains in
// [0.5, 3].
inline phstring::State random_state(std::mt19937& rng, const phstring::Mesh& mesh) {
  phstring::State s;
  s.positions = random_vector(rng, mesh.n_position_dofs(), -1.0, 1.0);
  s.velocities = random_vector(rng, mesh.n_position_dofs(), -1.0, 1.0);
  s.strains = random_vector(rng, mesh.n_elements, 0.5, 3.0);
  return s;
}

}  // namespace testing
