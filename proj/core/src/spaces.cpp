#include "holod/spaces.hpp"

#include <cmath>
#include <string>

#include "holod/assembly.hpp"

namespace holod {

Eigen::VectorXd eval_legendre(int p, double t) {
  Eigen::VectorXd vals(p + 1);
  const double s = 2.0 * t - 1.0;
  vals[0] = 1.0;
  if (p >= 1) vals[1] = s;
  for (int q = 1; q < p; ++q) {
    vals[q + 1] = ((2 * q + 1) * s * vals[q] - q * vals[q - 1]) / (q + 1);
  }
  return vals;
}

Eigen::VectorXd eval_legendre_derivative(int p, double t) {
  // P_{q+1}'(s) = (q+1) P_q(s) + s P_q'(s); chain rule gives d/dt = 2 d/ds.
  const double s = 2.0 * t - 1.0;
  Eigen::VectorXd vals = eval_legendre(p, t);
  Eigen::VectorXd ds(p + 1);
  ds[0] = 0.0;
  if (p >= 1) ds[1] = 1.0;
  for (int q = 1; q < p; ++q) {
    ds[q + 1] = (q + 1) * vals[q] + s * ds[q];
  }
  return 2.0 * ds;
}

CoarseSpace::CoarseSpace(TensorMesh mesh, int degree)
    : mesh_(mesh), degree_(degree) {
  if (degree_ < 0) {
    throw ConfigError("CoarseSpace: degree must be >= 0, got " +
                      std::to_string(degree_));
  }
  n_local_ = degree_ + 1;
  for (int a = 1; a < mesh_.dimension(); ++a) n_local_ *= degree_ + 1;

  const double volume = std::pow(mesh_.mesh_size(), mesh_.dimension());
  local_mass_.resize(n_local_);
  for (int local = 0; local < n_local_; ++local) {
    const auto q = local_degrees(local);
    double entry = volume;
    for (int a = 0; a < mesh_.dimension(); ++a) {
      entry /= 2 * q[a] + 1;
    }
    local_mass_[local] = entry;
  }
}

std::array<int, 2> CoarseSpace::local_degrees(int local) const {
  std::array<int, 2> q{local % (degree_ + 1), 0};
  if (mesh_.dimension() == 2) q[1] = local / (degree_ + 1);
  return q;
}

Eigen::VectorXd CoarseSpace::eval_local_basis(
    const std::array<double, 2>& t) const {
  const Eigen::VectorXd lx = eval_legendre(degree_, t[0]);
  if (mesh_.dimension() == 1) return lx;
  const Eigen::VectorXd ly = eval_legendre(degree_, t[1]);
  Eigen::VectorXd vals(n_local_);
  for (int local = 0; local < n_local_; ++local) {
    const auto q = local_degrees(local);
    vals[local] = lx[q[0]] * ly[q[1]];
  }
  return vals;
}

Eigen::VectorXd CoarseSpace::mass_diagonal() const {
  Eigen::VectorXd diag(n_dofs());
  for (int e = 0; e < mesh_.n_elements(); ++e) {
    diag.segment(e * n_local_, n_local_) = local_mass_;
  }
  return diag;
}

FineSpace::FineSpace(TensorMesh mesh) : mesh_(mesh) {
  dof_of_vertex_.assign(mesh_.n_vertices(), -1);
  for (int v = 0; v < mesh_.n_vertices(); ++v) {
    if (!mesh_.is_boundary_vertex(v)) {
      dof_of_vertex_[v] = static_cast<int>(vertex_of_dof_.size());
      vertex_of_dof_.push_back(v);
    }
  }
}

ProjectionOperator::ProjectionOperator(SparseMatrix coupling,
                                       Eigen::VectorXd mass_diagonal)
    : coupling_(std::move(coupling)), mass_diag_(std::move(mass_diagonal)) {
  if (coupling_.rows() != mass_diag_.size()) {
    throw DimensionMismatch("ProjectionOperator: coupling/mass size mismatch");
  }
}

Eigen::VectorXd ProjectionOperator::project(const Eigen::VectorXd& fine) const {
  if (fine.size() != coupling_.cols()) {
    throw DimensionMismatch("project: fine vector size mismatch");
  }
  return (coupling_ * fine).cwiseQuotient(mass_diag_);
}

ProjectionOperator assemble_projection(const FineSpace& fine,
                                       const CoarseSpace& coarse) {
  const TensorMesh& mesh = coarse.mesh();
  std::vector<int> all(mesh.n_elements());
  for (int e = 0; e < mesh.n_elements(); ++e) all[e] = e;

  std::vector<int> col_of_vertex(fine.mesh().n_vertices());
  for (int v = 0; v < fine.mesh().n_vertices(); ++v) {
    col_of_vertex[v] = fine.dof_of_vertex(v);
  }
  SparseMatrix B =
      assemble_coupling(fine, coarse, ElementSet(all, mesh.n_elements()),
                        col_of_vertex, fine.n_dofs());
  return ProjectionOperator(std::move(B), coarse.mass_diagonal());
}

}  // namespace holod
