#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "holod/assembly.hpp"
#include "holod/model.hpp"
#include "support/oracles.hpp"

using namespace holod;
namespace oracle = holod::testing;

TEST_SUITE("assembly") {

TEST_CASE("1D stiffness is the classic tridiagonal") {
  const FineSpace fine(TensorMesh(1, 4));
  const SparseMatrix A = assemble_stiffness(fine, Coefficient::constant(1, 1.0));
  const Eigen::MatrixXd D = Eigen::MatrixXd(A);
  REQUIRE(D.rows() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(D(i, i) == doctest::Approx(8.0).epsilon(1e-14));
    if (i > 0) CHECK(D(i, i - 1) == doctest::Approx(-4.0).epsilon(1e-14));
  }
  CHECK(D(0, 2) == 0.0);
}

TEST_CASE("2D reference element stiffness") {
  const Eigen::MatrixXd K = q1_element_stiffness(2, 0.125);
  for (int i = 0; i < 4; ++i) {
    CHECK(K(i, i) == doctest::Approx(2.0 / 3).epsilon(1e-14));
    CHECK(K.row(i).sum() == doctest::Approx(0.0).epsilon(1e-14));
  }
  CHECK((K - K.transpose()).norm() == 0.0);

  // symbolic oracle: s x m + m x s with s = [[1,-1],[-1,1]], m the 1D mass
  Eigen::Matrix2d s, m;
  s << 1, -1, -1, 1;
  m << 1.0 / 3, 1.0 / 6, 1.0 / 6, 1.0 / 3;
  for (int b = 0; b < 2; ++b) {
    for (int a = 0; a < 2; ++a) {
      for (int d = 0; d < 2; ++d) {
        for (int c = 0; c < 2; ++c) {
          CHECK(K(a + 2 * b, c + 2 * d) ==
                doctest::Approx(s(a, c) * m(b, d) + m(a, c) * s(b, d))
                    .epsilon(1e-14));
        }
      }
    }
  }
}

TEST_CASE("stiffness is linear in the coefficient") {
  ModelSpec spec;
  spec.eps_cells = 4;
  spec.seed = 11;
  const Coefficient A1 = generate_coefficient(spec, 2);
  const Coefficient A2(A1.mesh(), 2.0 * A1.values());
  const FineSpace fine(TensorMesh(2, 8));
  const SparseMatrix S1 = assemble_stiffness(fine, A1);
  const SparseMatrix S2 = assemble_stiffness(fine, A2);
  CHECK((Eigen::MatrixXd(S2) - 2.0 * Eigen::MatrixXd(S1)).norm() <= 1e-14);
}

TEST_CASE("stiffness rejects bad inputs") {
  const FineSpace fine(TensorMesh(2, 4));
  ModelSpec spec;
  spec.eps_cells = 8;
  CHECK_THROWS_AS(assemble_stiffness(fine, generate_coefficient(spec, 2)),
                  NonNestedMeshes);
  CHECK_THROWS_AS(Coefficient(TensorMesh(2, 2),
                              Eigen::VectorXd::Zero(4)),
                  NonPositiveCoefficient);
  Eigen::VectorXd negative(4);
  negative << 1.0, -0.5, 1.0, 1.0;
  CHECK_THROWS_AS(Coefficient(TensorMesh(2, 2), negative),
                  NonPositiveCoefficient);
}

TEST_CASE("interior stiffness rows sum to zero") {
  // constants lie in the kernel wherever the hat support avoids the boundary
  const FineSpace fine(TensorMesh(2, 8));
  const SparseMatrix A = assemble_stiffness(fine, Coefficient::constant(2, 1.0));
  const Eigen::VectorXd row_sums = A * Eigen::VectorXd::Ones(fine.n_dofs());
  for (int dof = 0; dof < fine.n_dofs(); ++dof) {
    const MultiIndex v = fine.mesh().vertex_index(fine.vertex_of_dof(dof));
    if (v[0] >= 2 && v[0] <= 6 && v[1] >= 2 && v[1] <= 6) {
      CHECK(std::abs(row_sums[dof]) <= 1e-12);
    }
  }
}

TEST_CASE("load vector basics") {
  const FineSpace fine(TensorMesh(1, 8));
  const Eigen::VectorXd zero =
      assemble_load(fine, [](double, double) { return 0.0; }, 2);
  CHECK(zero.norm() == 0.0);

  // f = 1 in 1D: each interior hat integrates to h
  const Eigen::VectorXd ones =
      assemble_load(fine, [](double, double) { return 1.0; }, 2);
  for (int i = 0; i < ones.size(); ++i) {
    CHECK(ones[i] == doctest::Approx(1.0 / 8).epsilon(1e-14));
  }
}

TEST_CASE("load quadrature is converged for f1") {
  const FineSpace fine(TensorMesh(2, 16));
  const ScalarField f1 = make_rhs(RhsSpec{RhsKind::F1, 1.0, ""});
  const Eigen::VectorXd coarse_rule = assemble_load(fine, f1, 4);
  const Eigen::VectorXd fine_rule = assemble_load(fine, f1, 7);
  CHECK((coarse_rule - fine_rule).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("coupling with the full element set reproduces the projection") {
  const FineSpace fine(TensorMesh(2, 8));
  const CoarseSpace coarse(TensorMesh(2, 2), 2);
  const ProjectionOperator proj = assemble_projection(fine, coarse);

  std::vector<int> all{0, 1, 2, 3};
  std::vector<int> cols(static_cast<size_t>(fine.mesh().n_vertices()));
  for (int v = 0; v < fine.mesh().n_vertices(); ++v) {
    cols[static_cast<size_t>(v)] = fine.dof_of_vertex(v);
  }
  const SparseMatrix B = assemble_coupling(
      fine, coarse, ElementSet(all, 4), cols, fine.n_dofs());
  CHECK((Eigen::MatrixXd(B) - Eigen::MatrixXd(proj.coupling())).norm() <=
        1e-14);
}

TEST_CASE("constant-mode coupling rows integrate the partition of unity") {
  const FineSpace fine(TensorMesh(2, 16));
  const CoarseSpace coarse(TensorMesh(2, 4), 1);
  const ProjectionOperator proj = assemble_projection(fine, coarse);
  const Eigen::VectorXd row_sums =
      proj.coupling() * Eigen::VectorXd::Ones(fine.n_dofs());
  const double K_volume = 0.25 * 0.25;
  // interior coarse element: hats covering K sum to one on it
  const int interior = coarse.mesh().element_at({1, 1});
  CHECK(row_sums[coarse.dof(interior, 0)] ==
        doctest::Approx(K_volume).epsilon(1e-13));
  // boundary coarse element: part of the partition of unity is eliminated
  const int corner = coarse.mesh().element_at({0, 0});
  CHECK(row_sums[coarse.dof(corner, 0)] < K_volume - 1e-6);
}

TEST_CASE("coupling block has full row rank on a single-element patch") {
  // h = H/4, p = 1: the 4 constraint rows are independent on the 9
  // interior DOFs of the element (dense rank oracle).
  const FineSpace fine(TensorMesh(2, 4));
  const CoarseSpace coarse(TensorMesh(2, 1), 1);
  std::vector<int> cols(static_cast<size_t>(fine.mesh().n_vertices()));
  for (int v = 0; v < fine.mesh().n_vertices(); ++v) {
    cols[static_cast<size_t>(v)] = fine.dof_of_vertex(v);
  }
  const SparseMatrix B = assemble_coupling(fine, coarse, ElementSet({0}, 1),
                                           cols, fine.n_dofs());
  const Eigen::MatrixXd dense_B = Eigen::MatrixXd(B);
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(dense_B);
  CHECK(lu.rank() == 4);
}

TEST_CASE("coupling rejects an empty patch") {
  const FineSpace fine(TensorMesh(2, 4));
  const CoarseSpace coarse(TensorMesh(2, 2), 1);
  CHECK_THROWS_AS(assemble_coupling(fine, coarse, ElementSet(), {}, 0),
                  EmptyPatch);
}

TEST_CASE("energy norm of the product sine interpolant") {
  // |grad u|^2 integrates to pi^2/2 for u = sin(pi x) sin(pi y)
  const FineSpace fine(TensorMesh(2, 32));
  const SparseMatrix A = assemble_stiffness(fine, Coefficient::constant(2, 1.0));
  const Eigen::VectorXd u = oracle::fine_interpolant(fine, [](double x, double y) {
    return std::sin(M_PI * x) * std::sin(M_PI * y);
  });
  const double energy_sq = u.dot(A * u);
  CHECK(energy_sq ==
        doctest::Approx(M_PI * M_PI / 2.0).epsilon(0.02));
  CHECK(energy_norm(A, Eigen::VectorXd::Zero(fine.n_dofs())) == 0.0);
}

TEST_CASE("norms satisfy the triangle inequality") {
  std::mt19937_64 rng(3);
  const FineSpace fine(TensorMesh(2, 8));
  const SparseMatrix A = assemble_stiffness(fine, Coefficient::constant(2, 1.0));
  const SparseMatrix M = assemble_mass(fine);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd x = oracle::random_vector(fine.n_dofs(), rng);
    const Eigen::VectorXd y = oracle::random_vector(fine.n_dofs(), rng);
    CHECK(energy_norm(A, x + y) <=
          energy_norm(A, x) + energy_norm(A, y) + 1e-12);
    CHECK(l2_norm(M, x + y) <= l2_norm(M, x) + l2_norm(M, y) + 1e-12);
  }
}

TEST_CASE("coefficient bounds pinch the quadratic form") {
  std::mt19937_64 rng(21);
  ModelSpec spec;
  spec.eps_cells = 8;
  spec.seed = 5;
  const Coefficient A = generate_coefficient(spec, 2);
  const FineSpace fine(TensorMesh(2, 16));
  const SparseMatrix S = assemble_stiffness(fine, A);
  const SparseMatrix S1 = assemble_stiffness(fine, Coefficient::constant(2, 1.0));
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXd v = oracle::random_vector(fine.n_dofs(), rng);
    const double form = v.dot(S * v);
    const double grad_sq = v.dot(S1 * v);
    CHECK(form >= A.alpha() * grad_sq * (1.0 - 1e-12));
    CHECK(form <= A.beta() * grad_sq * (1.0 + 1e-12));
  }
}

TEST_CASE("element energies sum to the quadratic form") {
  std::mt19937_64 rng(8);
  ModelSpec spec;
  spec.eps_cells = 4;
  const Coefficient A = generate_coefficient(spec, 2);
  const FineSpace fine(TensorMesh(2, 8));
  const SparseMatrix S = assemble_stiffness(fine, A);
  const Eigen::VectorXd v = oracle::random_vector(fine.n_dofs(), rng);
  const Eigen::VectorXd energies = element_energies(fine, A, v);
  CHECK(energies.sum() == doctest::Approx(v.dot(S * v)).epsilon(1e-12));
  CHECK(energies.minCoeff() >= 0.0);
}

TEST_CASE("coefficient file round-trip") {
  ModelSpec spec;
  spec.eps_cells = 8;
  spec.seed = 77;
  const Coefficient original = generate_coefficient(spec, 2);
  const std::string path = "coeff_roundtrip_test.csv";
  save_coefficient(path, original);
  const Coefficient loaded = load_coefficient(path);
  CHECK(loaded.mesh() == original.mesh());
  CHECK((loaded.values() - original.values()).lpNorm<Eigen::Infinity>() ==
        0.0);
  CHECK(loaded.alpha() == original.alpha());
  CHECK(loaded.beta() == original.beta());
  std::remove(path.c_str());

  CHECK_THROWS_AS(load_coefficient("does_not_exist.csv"), ConfigError);
}

}  // TEST_SUITE
