#include "holod/linalg.hpp"

#include <string>

#include "holod/parallel.hpp"

namespace holod {

SpdFactorization::SpdFactorization(const SparseMatrix& A) : n_(A.rows()) {
  if (A.rows() != A.cols()) {
    throw DimensionMismatch("factorize_spd: matrix not square");
  }
  llt_.compute(A);
  if (llt_.info() != Eigen::Success) {
    throw NotPositiveDefinite(
        "factorize_spd: non-positive pivot (matrix not SPD)");
  }
}

Vector SpdFactorization::solve(const Vector& b) const {
  if (b.size() != n_) {
    throw DimensionMismatch("SpdFactorization::solve: size mismatch");
  }
  return llt_.solve(b);
}

SchurKktSolver::SchurKktSolver(const SparseMatrix& A, const SparseMatrix& B,
                               int threads)
    : a_(A), bt_(B.transpose()) {
  const Eigen::Index n = A.rows();
  const Eigen::Index m = B.rows();
  if (B.cols() != n) {
    throw DimensionMismatch("SchurKktSolver: B columns must match A");
  }
  if (m > n) {
    throw RankDeficientConstraints(
        "SchurKktSolver: more constraints than unknowns");
  }
  if (m == 0) return;

  Eigen::MatrixXd S(m, m);
  parallel_for(static_cast<int>(m), threads, [&](int j) {
    const Vector y = a_.solve(Vector(bt_.col(j)));
    S.col(j) = bt_.transpose() * y;
  });

  s_ldlt_.compute(S);
  const double scale = S.cwiseAbs().maxCoeff();
  const double min_pivot = s_ldlt_.vectorD().minCoeff();
  if (s_ldlt_.info() != Eigen::Success || min_pivot <= 1e-12 * scale) {
    throw RankDeficientConstraints(
        "SchurKktSolver: constraint block rank-deficient (pivot " +
        std::to_string(min_pivot) + ", scale " + std::to_string(scale) +
        "); the fine mesh may be too coarse for this H and p");
  }
}

KktSolution SchurKktSolver::solve(const Vector& c, const Vector& g) const {
  if (c.size() != n() || g.size() != m()) {
    throw DimensionMismatch("SchurKktSolver::solve: size mismatch");
  }
  KktSolution out;
  if (m() == 0) {
    out.x = a_.solve(c);
    out.lambda = Vector(0);
    return out;
  }
  const Vector ainv_c = a_.solve(c);
  out.lambda = s_ldlt_.solve(bt_.transpose() * ainv_c - g);
  out.x = a_.solve(c - bt_ * out.lambda);
  return out;
}

KktSolution kkt_solve(const KktSystem& sys) {
  SchurKktSolver solver(sys.A, sys.B);
  return solver.solve(sys.c, sys.g);
}

}  // namespace holod
