#pragma once

#include <functional>
#include <string>

#include "holod/linalg.hpp"
#include "holod/mesh.hpp"
#include "holod/spaces.hpp"

namespace holod {

/// Scalar diffusion field, piecewise constant on the cells of an eps-mesh.
class Coefficient {
 public:
  /// Throws NonPositiveCoefficient unless all values are > 0.
  Coefficient(TensorMesh eps_mesh, Eigen::VectorXd cell_values);

  static Coefficient constant(int dimension, double value);

  const TensorMesh& mesh() const { return mesh_; }
  const Eigen::VectorXd& values() const { return values_; }
  double value(int eps_element) const { return values_[eps_element]; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

 private:
  TensorMesh mesh_;
  Eigen::VectorXd values_;
  double alpha_;
  double beta_;
};

/// Plain-text serialization: header line "dim,cells_per_axis", then one
/// cell value per line in row-major order, full precision.
void save_coefficient(const std::string& path, const Coefficient& coeff);
Coefficient load_coefficient(const std::string& path);

using ScalarField = std::function<double(double, double)>;

/// Reference Q1 element stiffness for coefficient 1: in 2D independent of
/// the element side (diagonal 2/3, zero row sums), in 1D scaled by 1/h.
Eigen::MatrixXd q1_element_stiffness(int dimension, double h);
Eigen::MatrixXd q1_element_mass(int dimension, double h);

/// Stiffness on interior DOFs for the bilinear form integral A grad u .
/// grad v. Requires the fine mesh nested in the coefficient mesh (each fine
/// cell sees one coefficient value), i.e. h <= eps.
SparseMatrix assemble_stiffness(const FineSpace& fine, const Coefficient& A);

SparseMatrix assemble_mass(const FineSpace& fine);

/// Load vector (f, phi_i) per interior DOF; tensor Gauss of the given order
/// per axis per fine cell. In 1D, f is called as f(x, 0).
Eigen::VectorXd assemble_load(const FineSpace& fine, const ScalarField& f,
                              int gauss_order);

/// Coupling block between coarse Legendre functions and fine hat functions:
/// rows indexed by (coarse element of `rows`, local Legendre index) in the
/// given element order, columns by col_of_vertex (vertices mapping to -1
/// are skipped). Entries are integral over K of Lambda_{K,j} phi_i, exact.
SparseMatrix assemble_coupling(const FineSpace& fine, const CoarseSpace& coarse,
                               const ElementSet& rows,
                               const std::vector<int>& col_of_vertex,
                               int n_cols);

/// sqrt(x' Q x); Q must be positive semidefinite for this to be a norm.
double energy_norm(const SparseMatrix& Q, const Eigen::VectorXd& x);
double l2_norm(const SparseMatrix& M, const Eigen::VectorXd& x);

/// Per-fine-element energies x' K_e x; summing a subset gives the squared
/// energy norm restricted to a subdomain.
Eigen::VectorXd element_energies(const FineSpace& fine, const Coefficient& A,
                                 const Eigen::VectorXd& x);

struct AssembledProblem {
  FineSpace fine;
  Coefficient coefficient;
  SparseMatrix stiffness;
  SparseMatrix mass;
  Eigen::VectorXd load;
  int load_quadrature_order = 0;
};

AssembledProblem assemble_problem(const FineSpace& fine, const Coefficient& A,
                                  const ScalarField& f, int load_gauss_order);

}  // namespace holod
