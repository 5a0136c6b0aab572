#include "holod/multiscale.hpp"

#include <Eigen/Cholesky>
#include <cstdio>
#include <vector>

#include "holod/parallel.hpp"

namespace holod {

namespace {

// Fraction of nonzero storage if the basis were written as one dense matrix.
double basis_fill_ratio(const CorrectorBasis& basis) {
  double stored = 0.0;
  for (int K = 0; K < basis.coarse().mesh().n_elements(); ++K) {
    stored += static_cast<double>(basis.element(K).vectors.size());
  }
  const double dense = static_cast<double>(basis.fine().n_dofs()) *
                       static_cast<double>(basis.n_functions());
  return dense > 0 ? stored / dense : 0.0;
}

SparseMatrix basis_matrix(const CorrectorBasis& basis) {
  const int n_local = basis.coarse().n_local();
  std::vector<Eigen::Triplet<double>> triplets;
  for (int K = 0; K < basis.coarse().mesh().n_elements(); ++K) {
    const ElementBasis& eb = basis.element(K);
    for (int j = 0; j < n_local; ++j) {
      const int col = basis.coarse().dof(K, j);
      for (size_t i = 0; i < eb.dofs.size(); ++i) {
        triplets.emplace_back(eb.dofs[i], col,
                              eb.vectors(static_cast<Eigen::Index>(i), j));
      }
    }
  }
  SparseMatrix C(basis.fine().n_dofs(), basis.n_functions());
  C.setFromTriplets(triplets.begin(), triplets.end());
  return C;
}

Eigen::MatrixXd dense_basis_matrix(const CorrectorBasis& basis) {
  const int n_local = basis.coarse().n_local();
  Eigen::MatrixXd X =
      Eigen::MatrixXd::Zero(basis.fine().n_dofs(), basis.n_functions());
  for (int K = 0; K < basis.coarse().mesh().n_elements(); ++K) {
    const ElementBasis& eb = basis.element(K);
    for (int j = 0; j < n_local; ++j) {
      const int col = basis.coarse().dof(K, j);
      for (size_t i = 0; i < eb.dofs.size(); ++i) {
        X(eb.dofs[i], col) = eb.vectors(static_cast<Eigen::Index>(i), j);
      }
    }
  }
  return X;
}

}  // namespace

ReferenceSolution solve_reference(const AssembledProblem& problem) {
  ReferenceSolution out;
  const SpdFactorization factor(problem.stiffness);
  out.u = factor.solve(problem.load);
  const double load_norm = problem.load.norm();
  out.residual = load_norm > 0.0
                     ? (problem.stiffness * out.u - problem.load).norm() /
                           load_norm
                     : 0.0;
  return out;
}

SparseMatrix assemble_coarse_stiffness(const CorrectorBasis& basis,
                                       const SparseMatrix& stiffness) {
  const SparseMatrix C = basis_matrix(basis);
  SparseMatrix G = SparseMatrix(C.transpose() * (stiffness * C).eval());
  G.prune(0.0);
  return G;
}

MultiscaleSolution solve_multiscale(const CorrectorBasis& basis,
                                    const AssembledProblem& problem,
                                    int threads) {
  if (basis.fine().mesh() != problem.fine.mesh()) {
    throw DimensionMismatch(
        "solve_multiscale: basis and problem use different fine meshes");
  }

  MultiscaleSolution out;
  const TensorMesh& coarse_mesh = basis.coarse().mesh();
  const double H = coarse_mesh.mesh_size();
  const double h = problem.fine.mesh().mesh_size();
  const int p = basis.coarse().degree();
  out.provenance.dim = coarse_mesh.dimension();
  out.provenance.H = H;
  out.provenance.h = h;
  out.provenance.p = p;
  out.provenance.ell = basis.ell();
  out.provenance.coupling_quad_order = (p + 2 + 1) / 2;
  out.provenance.load_quad_order = problem.load_quadrature_order;

  if (h * p * p / H > 1.0) {
    out.resolution_warning = true;
    std::fprintf(stderr,
                 "warning: resolution condition h <= H/p^2 violated "
                 "(h p^2 / H = %.3g); constraints may be ill-conditioned\n",
                 h * p * p / H);
  }

  const int n_basis = basis.n_functions();

  if (basis_fill_ratio(basis) > 0.25) {
    // Large patches: the basis is effectively dense, assemble with dense
    // blocks (column blocks bound the memory of the A*X intermediate).
    const Eigen::MatrixXd X = dense_basis_matrix(basis);
    Eigen::MatrixXd G(n_basis, n_basis);
    const int block = 256;
    const int n_blocks = (n_basis + block - 1) / block;
    parallel_for(n_blocks, threads, [&](int b) {
      const int j0 = b * block;
      const int width = std::min(block, n_basis - j0);
      const Eigen::MatrixXd T = problem.stiffness * X.middleCols(j0, width);
      G.middleCols(j0, width).noalias() = X.transpose() * T;
    });
    const Eigen::VectorXd rhs = X.transpose() * problem.load;
    const Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success) {
      throw SingularCoarseSystem(
          "solve_multiscale: coarse stiffness not positive definite");
    }
    out.coarse_coefficients = llt.solve(rhs);
    out.fine = X * out.coarse_coefficients;
    return out;
  }

  const SparseMatrix C = basis_matrix(basis);
  const SparseMatrix G = SparseMatrix(C.transpose() * (problem.stiffness * C).eval());
  const Eigen::VectorXd rhs = C.transpose() * problem.load;
  Eigen::SimplicialLLT<SparseMatrix> llt(G);
  if (llt.info() != Eigen::Success) {
    throw SingularCoarseSystem(
        "solve_multiscale: coarse stiffness not positive definite");
  }
  out.coarse_coefficients = llt.solve(rhs);
  out.fine = C * out.coarse_coefficients;
  return out;
}

ErrorReport error_report(const AssembledProblem& problem,
                         const ReferenceSolution& reference,
                         const MultiscaleSolution& solution) {
  if (reference.u.size() != solution.fine.size()) {
    throw DimensionMismatch("error_report: fine space mismatch");
  }
  const double energy_ref = energy_norm(problem.stiffness, reference.u);
  const double l2_ref = l2_norm(problem.mass, reference.u);
  if (energy_ref == 0.0 || l2_ref == 0.0) {
    throw ConfigError("error_report: reference solution has zero norm");
  }
  const Eigen::VectorXd diff = reference.u - solution.fine;
  return ErrorReport{energy_norm(problem.stiffness, diff) / energy_ref,
                     l2_norm(problem.mass, diff) / l2_ref};
}

}  // namespace holod
