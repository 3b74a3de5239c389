#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>

#include "phstring/assembly.hpp"
#include "support/assembly_oracle.hpp"
#include "support/testing.hpp"

using namespace phstring;
using testing::close_ulps;

TEST_CASE("uniform mesh construction") {
  const Mesh mesh = build_mesh(1.0, 30, 2);
  CHECK(mesh.n_nodes() == 31);
  CHECK(mesh.node_coords.front() == 0.0);
  CHECK(mesh.node_coords.back() == 1.0);
  double sum = 0.0;
  for (int e = 0; e < mesh.n_elements; ++e) {
    CHECK(close_ulps(mesh.elem_lengths[e], 1.0 / 30.0, 4.0));
    CHECK(mesh.elem_lengths[e] == mesh.node_coords[e + 1] - mesh.node_coords[e]);
    sum += mesh.elem_lengths[e];
  }
  CHECK(close_ulps(sum, mesh.length, 4.0));

  const Mesh single = build_mesh(1.0, 1, 2);
  CHECK(single.node_coords == std::vector<double>{0.0, 1.0});

  const Mesh three_d = build_mesh(2.0, 4, 3);
  for (double len : three_d.elem_lengths) CHECK(len == 0.5);
}

TEST_CASE("mesh construction rejects bad arguments") {
  CHECK_THROWS_AS(build_mesh(0.0, 10, 2), std::invalid_argument);
  CHECK_THROWS_AS(build_mesh(1.0, 0, 2), std::invalid_argument);
  CHECK_THROWS_AS(build_mesh(1.0, 10, 4), std::invalid_argument);
  CHECK_THROWS_AS(build_mesh(std::vector<double>{0.0, 0.5, 0.5, 1.0}, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_mesh(std::vector<double>{0.1, 0.5, 1.0}, 2),
                  std::invalid_argument);
}

TEST_CASE("consistent mass blocks") {
  const Mesh mesh = build_mesh(1.0, 1, 1);
  const Eigen::MatrixXd m = assemble_mass(mesh, 1.0);
  CHECK(m(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(m(0, 1) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(m(1, 0) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(m(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  // element of length 1/30: (rhoA l / 6) [[2, 1], [1, 2]] per component
  const Mesh fine = build_mesh(1.0 / 30.0, 1, 2);
  const Eigen::MatrixXd mf = assemble_mass(fine, 1.0);
  CHECK(mf(0, 0) == doctest::Approx(2.0 / 180.0).epsilon(1e-13));
  CHECK(mf(0, 2) == doctest::Approx(1.0 / 180.0).epsilon(1e-13));
  CHECK(mf(0, 1) == 0.0);  // components do not couple
}

TEST_CASE("mass matrix is symmetric positive definite and reproduces the total mass") {
  const Mesh mesh = build_mesh(1.0, 30, 2);
  const double rho_a = 1.7;
  const Eigen::MatrixXd m = assemble_mass(mesh, rho_a);
  CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(m);
  CHECK(eigen.eigenvalues().minCoeff() > 0.0);
  // partition of unity: per component, 1^T M 1 = rhoA L
  for (int c = 0; c < 2; ++c) {
    Eigen::VectorXd ones = Eigen::VectorXd::Zero(mesh.n_position_dofs());
    for (int node = 0; node < mesh.n_nodes(); ++node) ones[mesh.dof(node, c)] = 1.0;
    CHECK(ones.dot(m * ones) ==
          doctest::Approx(rho_a * mesh.length).epsilon(1e-12));
    // row sums equal the lumped nodal lengths
    const Eigen::VectorXd row_sums = m * ones;
    for (int node = 0; node < mesh.n_nodes(); ++node) {
      double lumped = 0.0;
      if (node > 0) lumped += 0.5 * mesh.elem_lengths[node - 1];
      if (node < mesh.n_elements) lumped += 0.5 * mesh.elem_lengths[node];
      CHECK(row_sums[mesh.dof(node, c)] ==
            doctest::Approx(rho_a * lumped).epsilon(1e-12));
    }
  }
}

TEST_CASE("strain mass is the element lengths") {
  const Mesh uniform = build_mesh(1.0, 30, 2);
  const Eigen::VectorXd ms = assemble_strain_mass(uniform);
  for (int e = 0; e < 30; ++e) CHECK(close_ulps(ms[e], 1.0 / 30.0, 4.0));

  CHECK(assemble_strain_mass(build_mesh(1.0, 1, 2))[0] == doctest::Approx(1.0));

  const Mesh nonuniform = build_mesh(std::vector<double>{0.0, 0.25, 1.0}, 2);
  const Eigen::VectorXd msn = assemble_strain_mass(nonuniform);
  CHECK(msn[0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(msn[1] == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("consistent body-force load") {
  const Mesh mesh = build_mesh(1.0, 1, 2);
  const Eigen::VectorXd load = assemble_body_force(mesh, Eigen::Vector2d(0.0, -9.81));
  CHECK(load[0] == 0.0);
  CHECK(load[1] == doctest::Approx(-4.905).epsilon(1e-14));
  CHECK(load[3] == doctest::Approx(-4.905).epsilon(1e-14));

  CHECK(assemble_body_force(mesh, Eigen::Vector2d(0.0, 0.0)).norm() == 0.0);

  // gravity on 30 elements: component sum reproduces the resultant
  const Mesh fine = build_mesh(1.0, 30, 2);
  const Eigen::VectorXd gravity = assemble_body_force(fine, Eigen::Vector2d(0.0, -9.81));
  double sum_y = 0.0;
  for (int node = 0; node < fine.n_nodes(); ++node) sum_y += gravity[fine.dof(node, 1)];
  CHECK(sum_y == doctest::Approx(-9.81).epsilon(1e-13));
}

TEST_CASE("tangent coupling column blocks") {
  const Mesh mesh = build_mesh(1.0, 1, 2);
  Eigen::VectorXd r(4);
  r << 0.0, 0.0, 1.0, 0.0;
  const Eigen::MatrixXd k = assemble_tangent_coupling(mesh, r);
  CHECK(k(0, 0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(k(1, 0) == 0.0);
  CHECK(k(2, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(k(3, 0) == 0.0);

  CHECK(assemble_tangent_coupling(mesh, Eigen::VectorXd::Zero(4)).norm() == 0.0);
}

TEST_CASE("tangent coupling is linear in the positions") {
  const Mesh mesh = build_mesh(std::vector<double>{0.0, 0.25, 0.5, 1.0}, 2);
  // dyadic inputs make the identity exact in floating point
  Eigen::VectorXd r1(mesh.n_position_dofs()), r2(mesh.n_position_dofs());
  for (int i = 0; i < r1.size(); ++i) {
    r1[i] = (i % 5) / 4.0;
    r2[i] = ((i * 3) % 7) / 8.0;
  }
  const Eigen::MatrixXd sum = assemble_tangent_coupling(mesh, r1 + r2);
  const Eigen::MatrixXd parts =
      assemble_tangent_coupling(mesh, r1) + assemble_tangent_coupling(mesh, r2);
  CHECK((sum - parts).cwiseAbs().maxCoeff() == 0.0);
  // scaling by 2 is exact as well
  const Eigen::MatrixXd doubled = assemble_tangent_coupling(mesh, 2.0 * r1);
  CHECK((doubled - 2.0 * assemble_tangent_coupling(mesh, r1)).cwiseAbs().maxCoeff() == 0.0);

  std::mt19937 rng(71);
  const Eigen::VectorXd a = testing::random_vector(rng, r1.size(), -1.0, 1.0);
  const Eigen::VectorXd b = testing::random_vector(rng, r1.size(), -1.0, 1.0);
  CHECK(testing::rel_matrix_diff(
            assemble_tangent_coupling(mesh, a + b),
            assemble_tangent_coupling(mesh, a) + assemble_tangent_coupling(mesh, b)) <=
        1e-14);
}

TEST_CASE("initial strain projection") {
  const Mesh mesh = build_mesh(1.0, 8, 2);
  Eigen::VectorXd diag(mesh.n_position_dofs());
  const double c = std::sqrt(2.0) / 2.0;
  for (int node = 0; node < mesh.n_nodes(); ++node) {
    diag[mesh.dof(node, 0)] = c * mesh.node_coords[node];
    diag[mesh.dof(node, 1)] = -c * mesh.node_coords[node];
  }
  const Eigen::VectorXd strains = project_initial_strain(mesh, diag);
  for (int e = 0; e < mesh.n_elements; ++e) {
    CHECK(strains[e] == doctest::Approx(1.0).epsilon(1e-14));
  }

  Eigen::VectorXd stretched(mesh.n_position_dofs());
  for (int node = 0; node < mesh.n_nodes(); ++node) {
    stretched[mesh.dof(node, 0)] = 2.0 * mesh.node_coords[node];
    stretched[mesh.dof(node, 1)] = 0.0;
  }
  const Eigen::VectorXd doubled = project_initial_strain(mesh, stretched);
  for (int e = 0; e < mesh.n_elements; ++e) {
    CHECK(doubled[e] == doctest::Approx(4.0).epsilon(1e-14));
  }

  const Mesh nonuniform = build_mesh(std::vector<double>{0.0, 0.3, 1.0}, 2);
  Eigen::VectorXd straight(nonuniform.n_position_dofs());
  for (int node = 0; node < nonuniform.n_nodes(); ++node) {
    straight[nonuniform.dof(node, 0)] = nonuniform.node_coords[node];
    straight[nonuniform.dof(node, 1)] = 0.0;
  }
  const Eigen::VectorXd ones = project_initial_strain(nonuniform, straight);
  CHECK(ones[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ones[1] == doctest::Approx(1.0).epsilon(1e-14));

  // coincident nodes give C = 0, which the state invariant forbids
  Eigen::VectorXd degenerate = straight;
  degenerate[nonuniform.dof(1, 0)] = 0.0;
  degenerate[nonuniform.dof(2, 0)] = 0.0;
  CHECK_THROWS_AS(project_initial_strain(nonuniform, degenerate), std::domain_error);
}

TEST_CASE("stored energy integral") {
  const MaterialLaw law{MaterialKind::Hyperelastic, 20.0};
  const Mesh mesh = build_mesh(1.0, 1, 2);
  CHECK(stored_energy_integral(mesh, law, Eigen::VectorXd::Ones(1)) == 0.0);
  const double w2 = 5.0 * (1.0 - std::log(2.0));
  CHECK(stored_energy_integral(mesh, law, Eigen::VectorXd::Constant(1, 2.0)) ==
        doctest::Approx(w2).epsilon(1e-15));

  const Mesh two = build_mesh(1.0, 2, 2);
  Eigen::VectorXd strains(2);
  strains << 1.0, 2.0;
  CHECK(stored_energy_integral(two, law, strains) ==
        doctest::Approx(0.5 * w2).epsilon(1e-14));
  CHECK(stored_energy_integral(two, law, strains) ==
        doctest::Approx(0.76713204860013673).epsilon(1e-12));

  // the two-point rule reproduces sum_e l_e W(C_e) exactly for constant C^h
  const Mesh nonuniform = build_mesh(std::vector<double>{0.0, 0.2, 0.9, 1.7}, 2);
  Eigen::VectorXd c(3);
  c << 0.8, 1.3, 2.4;
  double direct = 0.0;
  for (int e = 0; e < 3; ++e) {
    direct += nonuniform.elem_lengths[e] * stored_energy_density(law, c[e]);
  }
  CHECK(close_ulps(stored_energy_integral(nonuniform, law, c), direct, 4.0));
}

TEST_CASE("strain-rate compatibility of the coupling operator") {
  // per element, (M_S^-1 2 K(r)^T v)_e equals the pointwise 2 d_s r . d_s v
  const Mesh mesh = build_mesh(std::vector<double>{0.0, 0.35, 0.6, 1.4}, 3);
  std::mt19937 rng(2024);
  const Eigen::VectorXd r = testing::random_vector(rng, mesh.n_position_dofs(), -1.0, 1.0);
  const Eigen::VectorXd v = testing::random_vector(rng, mesh.n_position_dofs(), -1.0, 1.0);
  const Eigen::VectorXd ms = assemble_strain_mass(mesh);
  const Eigen::VectorXd rate = 2.0 * (assemble_tangent_coupling(mesh, r).transpose() * v);
  for (int e = 0; e < mesh.n_elements; ++e) {
    const double len = mesh.elem_lengths[e];
    const Eigen::VectorXd dr = element_difference(mesh, r, e) / len;
    const Eigen::VectorXd dv = element_difference(mesh, v, e) / len;
    CHECK(close_ulps(rate[e] / ms[e], 2.0 * dr.dot(dv), 4.0));
  }
}

TEST_CASE("assembled operators match the independent quadrature oracle") {
  std::mt19937 rng(555);
  const std::vector<Mesh> meshes{
      build_mesh(1.0, 1, 2),
      build_mesh(std::vector<double>{0.0, 0.25, 1.0}, 1),
      build_mesh(2.0, 3, 3),
      build_mesh(std::vector<double>{0.0, 0.4, 0.7, 1.5}, 2),
  };
  for (const auto& mesh : meshes) {
    const double rho_a = 1.3;
    CHECK(testing::rel_matrix_diff(assemble_mass(mesh, rho_a),
                                   oracle::mass(mesh, rho_a)) <= 1e-12);
    CHECK(testing::rel_matrix_diff(assemble_strain_mass(mesh),
                                   oracle::strain_mass(mesh)) <= 1e-12);
    const Eigen::VectorXd b = testing::random_vector(rng, mesh.dimension, -10.0, 10.0);
    CHECK(testing::rel_matrix_diff(assemble_body_force(mesh, b),
                                   oracle::body_force(mesh, b)) <= 1e-12);
    const Eigen::VectorXd r = testing::random_vector(rng, mesh.n_position_dofs(), -1.0, 1.0);
    CHECK(testing::rel_matrix_diff(assemble_tangent_coupling(mesh, r),
                                   oracle::tangent_coupling(mesh, r)) <= 1e-12);
  }
}

TEST_CASE("assemble_mass rejects nonpositive density") {
  CHECK_THROWS_AS(assemble_mass(build_mesh(1.0, 2, 2), 0.0), std::invalid_argument);
}
