#include "holod/assembly.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "holod/quadrature.hpp"

namespace holod {

namespace {

// Exact 1D integrals of the Q1 shape functions l0(t)=1-t, l1(t)=t on [0,1].
constexpr double kGrad[2][2] = {{1.0, -1.0}, {-1.0, 1.0}};       // l_a' l_c'
constexpr double kMass1[2][2] = {{1.0 / 3, 1.0 / 6}, {1.0 / 6, 1.0 / 3}};

int parent_eps_element(const TensorMesh& fine_mesh, const TensorMesh& eps_mesh,
                       int fine_element) {
  const int ratio = fine_mesh.cells_per_axis() / eps_mesh.cells_per_axis();
  const MultiIndex idx = fine_mesh.element_index(fine_element);
  return eps_mesh.element_at({idx[0] / ratio, idx[1] / ratio});
}

void check_coefficient_nesting(const FineSpace& fine, const Coefficient& A) {
  if (fine.mesh().dimension() != A.mesh().dimension()) {
    throw NonNestedMeshes("assembly: coefficient dimension mismatch");
  }
  if (fine.mesh().cells_per_axis() % A.mesh().cells_per_axis() != 0) {
    throw NonNestedMeshes(
        "assembly: fine mesh must resolve the coefficient mesh (h <= eps)");
  }
}

}  // namespace

Coefficient::Coefficient(TensorMesh eps_mesh, Eigen::VectorXd cell_values)
    : mesh_(eps_mesh), values_(std::move(cell_values)) {
  if (values_.size() != mesh_.n_elements()) {
    throw DimensionMismatch("Coefficient: one value per eps-cell required");
  }
  alpha_ = values_.minCoeff();
  beta_ = values_.maxCoeff();
  if (!(alpha_ > 0.0) || !std::isfinite(beta_)) {
    throw NonPositiveCoefficient(
        "Coefficient: values must be positive and finite");
  }
}

Coefficient Coefficient::constant(int dimension, double value) {
  return Coefficient(TensorMesh(dimension, 1),
                     Eigen::VectorXd::Constant(1, value));
}

void save_coefficient(const std::string& path, const Coefficient& coeff) {
  std::ofstream out(path);
  if (!out) throw ConfigError("save_coefficient: cannot open " + path);
  out.precision(17);
  out << coeff.mesh().dimension() << "," << coeff.mesh().cells_per_axis()
      << "\n";
  for (Eigen::Index i = 0; i < coeff.values().size(); ++i) {
    out << coeff.values()[i] << "\n";
  }
  if (!out) throw ConfigError("save_coefficient: write failed for " + path);
}

Coefficient load_coefficient(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("load_coefficient: cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) {
    throw ConfigError("load_coefficient: missing header in " + path);
  }
  int dim = 0, n = 0;
  char comma = 0;
  std::istringstream hs(header);
  if (!(hs >> dim >> comma >> n) || comma != ',') {
    throw ConfigError("load_coefficient: bad header '" + header + "'");
  }
  TensorMesh mesh(dim, n);
  Eigen::VectorXd values(mesh.n_elements());
  for (int i = 0; i < mesh.n_elements(); ++i) {
    if (!(in >> values[i])) {
      throw ConfigError("load_coefficient: expected " +
                        std::to_string(mesh.n_elements()) + " values in " +
                        path);
    }
  }
  return Coefficient(mesh, std::move(values));
}

Eigen::MatrixXd q1_element_stiffness(int dimension, double h) {
  if (dimension == 1) {
    Eigen::MatrixXd K(2, 2);
    for (int a = 0; a < 2; ++a) {
      for (int c = 0; c < 2; ++c) K(a, c) = kGrad[a][c] / h;
    }
    return K;
  }
  // 2D: K[(a,b),(c,d)] = s_ac m_bd + m_ac s_bd; independent of h.
  Eigen::MatrixXd K(4, 4);
  for (int b = 0; b < 2; ++b) {
    for (int a = 0; a < 2; ++a) {
      for (int d = 0; d < 2; ++d) {
        for (int c = 0; c < 2; ++c) {
          K(a + 2 * b, c + 2 * d) =
              kGrad[a][c] * kMass1[b][d] + kMass1[a][c] * kGrad[b][d];
        }
      }
    }
  }
  return K;
}

Eigen::MatrixXd q1_element_mass(int dimension, double h) {
  if (dimension == 1) {
    Eigen::MatrixXd M(2, 2);
    for (int a = 0; a < 2; ++a) {
      for (int c = 0; c < 2; ++c) M(a, c) = kMass1[a][c] * h;
    }
    return M;
  }
  Eigen::MatrixXd M(4, 4);
  for (int b = 0; b < 2; ++b) {
    for (int a = 0; a < 2; ++a) {
      for (int d = 0; d < 2; ++d) {
        for (int c = 0; c < 2; ++c) {
          M(a + 2 * b, c + 2 * d) = kMass1[a][c] * kMass1[b][d] * h * h;
        }
      }
    }
  }
  return M;
}

namespace {

SparseMatrix assemble_q1_bilinear(const FineSpace& fine,
                                  const Eigen::MatrixXd& element_matrix,
                                  const std::function<double(int)>& scale) {
  const TensorMesh& mesh = fine.mesh();
  const int n = fine.n_dofs();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<size_t>(mesh.n_elements()) * 16);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const std::vector<int> verts = mesh.element_vertices(e);
    const double factor = scale(e);
    for (size_t a = 0; a < verts.size(); ++a) {
      const int ia = fine.dof_of_vertex(verts[a]);
      if (ia < 0) continue;
      for (size_t c = 0; c < verts.size(); ++c) {
        const int ic = fine.dof_of_vertex(verts[c]);
        if (ic < 0) continue;
        triplets.emplace_back(
            ia, ic,
            factor * element_matrix(static_cast<Eigen::Index>(a),
                                    static_cast<Eigen::Index>(c)));
      }
    }
  }
  SparseMatrix out(n, n);
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

}  // namespace

SparseMatrix assemble_stiffness(const FineSpace& fine, const Coefficient& A) {
  check_coefficient_nesting(fine, A);
  const Eigen::MatrixXd K =
      q1_element_stiffness(fine.mesh().dimension(), fine.mesh().mesh_size());
  return assemble_q1_bilinear(fine, K, [&](int e) {
    return A.value(parent_eps_element(fine.mesh(), A.mesh(), e));
  });
}

SparseMatrix assemble_mass(const FineSpace& fine) {
  const Eigen::MatrixXd M =
      q1_element_mass(fine.mesh().dimension(), fine.mesh().mesh_size());
  return assemble_q1_bilinear(fine, M, [](int) { return 1.0; });
}

Eigen::VectorXd assemble_load(const FineSpace& fine, const ScalarField& f,
                              int gauss_order) {
  const TensorMesh& mesh = fine.mesh();
  const int dim = mesh.dimension();
  const double h = mesh.mesh_size();
  const GaussRule rule = gauss_rule(gauss_order);
  const int nq = rule.order;

  Eigen::VectorXd load = Eigen::VectorXd::Zero(fine.n_dofs());
  const double cell_volume = std::pow(h, dim);

  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto corner = mesh.element_lower_corner(e);
    const std::vector<int> verts = mesh.element_vertices(e);
    if (dim == 1) {
      for (int qx = 0; qx < nq; ++qx) {
        const double tx = rule.nodes[qx];
        const double w = rule.weights[qx] * cell_volume;
        const double fv = f(corner[0] + tx * h, 0.0);
        const double shape[2] = {1.0 - tx, tx};
        for (int a = 0; a < 2; ++a) {
          const int dof = fine.dof_of_vertex(verts[a]);
          if (dof >= 0) load[dof] += w * fv * shape[a];
        }
      }
    } else {
      for (int qy = 0; qy < nq; ++qy) {
        const double ty = rule.nodes[qy];
        for (int qx = 0; qx < nq; ++qx) {
          const double tx = rule.nodes[qx];
          const double w = rule.weights[qx] * rule.weights[qy] * cell_volume;
          const double fv = f(corner[0] + tx * h, corner[1] + ty * h);
          const double sx[2] = {1.0 - tx, tx};
          const double sy[2] = {1.0 - ty, ty};
          for (int b = 0; b < 2; ++b) {
            for (int a = 0; a < 2; ++a) {
              const int dof = fine.dof_of_vertex(verts[a + 2 * b]);
              if (dof >= 0) load[dof] += w * fv * sx[a] * sy[b];
            }
          }
        }
      }
    }
  }
  return load;
}

SparseMatrix assemble_coupling(const FineSpace& fine, const CoarseSpace& coarse,
                               const ElementSet& rows,
                               const std::vector<int>& col_of_vertex,
                               int n_cols) {
  if (rows.size() == 0) {
    throw EmptyPatch("assemble_coupling: empty element set");
  }
  const TensorMesh& fine_mesh = fine.mesh();
  const TensorMesh& coarse_mesh = coarse.mesh();
  if (fine_mesh.dimension() != coarse_mesh.dimension() ||
      fine_mesh.cells_per_axis() % coarse_mesh.cells_per_axis() != 0) {
    throw NonNestedMeshes("assemble_coupling: meshes not nested");
  }
  if (col_of_vertex.size() != static_cast<size_t>(fine_mesh.n_vertices())) {
    throw DimensionMismatch("assemble_coupling: vertex map size mismatch");
  }

  const int dim = fine_mesh.dimension();
  const int p = coarse.degree();
  const int n_local = coarse.n_local();
  const double h = fine_mesh.mesh_size();
  const double H = coarse_mesh.mesh_size();
  const double cell_volume = std::pow(h, dim);
  const NestingMap nest(coarse_mesh, fine_mesh);

  // Integrand per axis has degree <= p + 1, exact for order >= (p+2)/2.
  const GaussRule rule = gauss_rule((p + 2 + 1) / 2);
  const int nq = rule.order;

  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<double> local(static_cast<size_t>(n_local));

  for (int r = 0; r < rows.size(); ++r) {
    const int K = rows[r];
    const auto k_corner = coarse_mesh.element_lower_corner(K);
    for (int child : nest.children(K)) {
      const auto corner = fine_mesh.element_lower_corner(child);
      const std::vector<int> verts = fine_mesh.element_vertices(child);
      const int nv = static_cast<int>(verts.size());
      for (int v = 0; v < nv; ++v) {
        const int col = col_of_vertex[verts[v]];
        if (col < 0) continue;
        std::fill(local.begin(), local.end(), 0.0);
        const int va = v % 2;
        const int vb = v / 2;
        if (dim == 1) {
          for (int qx = 0; qx < nq; ++qx) {
            const double tx = rule.nodes[qx];
            const double x = corner[0] + tx * h;
            const double shape = (va == 0) ? 1.0 - tx : tx;
            const double w = rule.weights[qx] * cell_volume * shape;
            const Eigen::VectorXd lx =
                eval_legendre(p, (x - k_corner[0]) / H);
            for (int j = 0; j <= p; ++j) local[j] += w * lx[j];
          }
        } else {
          for (int qy = 0; qy < nq; ++qy) {
            const double ty = rule.nodes[qy];
            const double y = corner[1] + ty * h;
            const double sy = (vb == 0) ? 1.0 - ty : ty;
            const Eigen::VectorXd ly =
                eval_legendre(p, (y - k_corner[1]) / H);
            for (int qx = 0; qx < nq; ++qx) {
              const double tx = rule.nodes[qx];
              const double x = corner[0] + tx * h;
              const double sx = (va == 0) ? 1.0 - tx : tx;
              const double w =
                  rule.weights[qx] * rule.weights[qy] * cell_volume * sx * sy;
              const Eigen::VectorXd lx =
                  eval_legendre(p, (x - k_corner[0]) / H);
              for (int jb = 0; jb <= p; ++jb) {
                for (int ja = 0; ja <= p; ++ja) {
                  local[static_cast<size_t>(ja + (p + 1) * jb)] +=
                      w * lx[ja] * ly[jb];
                }
              }
            }
          }
        }
        for (int j = 0; j < n_local; ++j) {
          triplets.emplace_back(r * n_local + j, col, local[j]);
        }
      }
    }
  }

  SparseMatrix B(rows.size() * n_local, n_cols);
  B.setFromTriplets(triplets.begin(), triplets.end());
  return B;
}

double energy_norm(const SparseMatrix& Q, const Eigen::VectorXd& x) {
  if (Q.rows() != x.size()) {
    throw DimensionMismatch("energy_norm: size mismatch");
  }
  const double q = x.dot(Q * x);
  return std::sqrt(std::max(q, 0.0));
}

double l2_norm(const SparseMatrix& M, const Eigen::VectorXd& x) {
  return energy_norm(M, x);
}

Eigen::VectorXd element_energies(const FineSpace& fine, const Coefficient& A,
                                 const Eigen::VectorXd& x) {
  check_coefficient_nesting(fine, A);
  if (x.size() != fine.n_dofs()) {
    throw DimensionMismatch("element_energies: vector size mismatch");
  }
  const TensorMesh& mesh = fine.mesh();
  const Eigen::MatrixXd K =
      q1_element_stiffness(mesh.dimension(), mesh.mesh_size());
  Eigen::VectorXd energies(mesh.n_elements());
  Eigen::VectorXd local(K.rows());
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const std::vector<int> verts = mesh.element_vertices(e);
    for (size_t a = 0; a < verts.size(); ++a) {
      const int dof = fine.dof_of_vertex(verts[a]);
      local[static_cast<Eigen::Index>(a)] = (dof >= 0) ? x[dof] : 0.0;
    }
    const double value = A.value(parent_eps_element(mesh, A.mesh(), e));
    energies[e] = value * local.dot(K * local);
  }
  return energies;
}

AssembledProblem assemble_problem(const FineSpace& fine, const Coefficient& A,
                                  const ScalarField& f, int load_gauss_order) {
  return AssembledProblem{fine,
                          A,
                          assemble_stiffness(fine, A),
                          assemble_mass(fine),
                          assemble_load(fine, f, load_gauss_order),
                          load_gauss_order};
}

}  // namespace holod
