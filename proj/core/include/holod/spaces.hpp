#pragma once

#include <array>
#include <vector>

#include "holod/linalg.hpp"
#include "holod/mesh.hpp"

namespace holod {

/// Values of the shifted Legendre polynomials L~_0 .. L~_p at t in [0,1],
/// normalized so L~_q(1) = 1. They are L2-orthogonal on [0,1] with
/// integral L~_q^2 = 1/(2q+1).
Eigen::VectorXd eval_legendre(int p, double t);

/// First derivatives d/dt L~_0 .. L~_p at t in [0,1].
Eigen::VectorXd eval_legendre_derivative(int p, double t);

/// Discontinuous coarse space: per element, tensor products of shifted
/// Legendre polynomials of coordinate degree <= p. DOFs are numbered
/// element-major; within an element, local index j corresponds to per-axis
/// degrees (q0, q1) with j = q0 + (p+1)*q1 (axis 0 fastest).
class CoarseSpace {
 public:
  CoarseSpace(TensorMesh mesh, int degree);

  const TensorMesh& mesh() const { return mesh_; }
  int degree() const { return degree_; }
  int n_local() const { return n_local_; }
  int n_dofs() const { return n_local_ * mesh_.n_elements(); }
  int dof(int element, int local) const { return element * n_local_ + local; }
  int element_of_dof(int dof) const { return dof / n_local_; }
  int local_of_dof(int dof) const { return dof % n_local_; }
  std::array<int, 2> local_degrees(int local) const;

  /// Element-local basis values at a point given in element-local
  /// coordinates t in [0,1]^d.
  Eigen::VectorXd eval_local_basis(const std::array<double, 2>& t) const;

  /// Element mass matrix is diagonal: entries |K| * prod_axes 1/(2q+1).
  const Eigen::VectorXd& local_mass_diagonal() const { return local_mass_; }
  Eigen::VectorXd mass_diagonal() const;

 private:
  TensorMesh mesh_;
  int degree_;
  int n_local_;
  Eigen::VectorXd local_mass_;
};

/// Conforming Q1 space on the fine mesh with homogeneous Dirichlet boundary
/// handled by DOF elimination (interior vertices only).
class FineSpace {
 public:
  explicit FineSpace(TensorMesh mesh);

  const TensorMesh& mesh() const { return mesh_; }
  int n_dofs() const { return static_cast<int>(vertex_of_dof_.size()); }
  /// -1 for boundary vertices.
  int dof_of_vertex(int vertex) const { return dof_of_vertex_[vertex]; }
  int vertex_of_dof(int dof) const { return vertex_of_dof_[dof]; }

 private:
  TensorMesh mesh_;
  std::vector<int> dof_of_vertex_;
  std::vector<int> vertex_of_dof_;
};

/// The element-wise L2 projection onto the coarse space, factored as
/// P = D^-1 B with B[(K,j), i] = integral over K of Lambda_{K,j} phi_i and
/// D the diagonal coarse mass matrix.
class ProjectionOperator {
 public:
  ProjectionOperator(SparseMatrix coupling, Eigen::VectorXd mass_diagonal);

  /// B; rows are coarse DOFs, columns fine interior DOFs.
  const SparseMatrix& coupling() const { return coupling_; }
  const Eigen::VectorXd& mass_diagonal() const { return mass_diag_; }

  /// Coarse Legendre coefficients of the projection of a fine vector.
  Eigen::VectorXd project(const Eigen::VectorXd& fine) const;

 private:
  SparseMatrix coupling_;
  Eigen::VectorXd mass_diag_;
};

/// Assembles the global projection operator. Requires the fine mesh to be
/// nested in the coarse mesh. Integrals are exact (tensor Gauss rule of
/// order ceil((p+2)/2) per axis per fine cell).
ProjectionOperator assemble_projection(const FineSpace& fine,
                                       const CoarseSpace& coarse);

}  // namespace holod
