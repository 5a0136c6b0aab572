#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "holod/errors.hpp"

namespace holod {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

/// Sparse Cholesky (with fill-reducing ordering) of an SPD matrix.
/// Immutable after construction; solve() is const and may be called from
/// several threads against one factorization.
class SpdFactorization {
 public:
  /// Throws NotPositiveDefinite when a non-positive pivot is met.
  explicit SpdFactorization(const SparseMatrix& A);

  Vector solve(const Vector& b) const;
  Eigen::Index size() const { return n_; }

 private:
  Eigen::SimplicialLLT<SparseMatrix> llt_;
  Eigen::Index n_;
};

inline SpdFactorization factorize_spd(const SparseMatrix& A) {
  return SpdFactorization(A);
}

/// Equality-constrained quadratic minimization
///   min 1/2 x'Ax - c'x   subject to  Bx = g,
/// stated through its first-order (KKT) system
///   A x + B' lambda = c,   B x = g.
struct KktSystem {
  SparseMatrix A;  ///< n x n, SPD
  SparseMatrix B;  ///< m x n, full row rank, m <= n
  Vector g;        ///< length m
  Vector c;        ///< length n
};

struct KktSolution {
  Vector x;
  Vector lambda;
};

/// Schur-complement KKT solver: factorizes A once, forms S = B A^-1 B'
/// column by column (dense, m x m), and factorizes S once. Both
/// factorizations are shared across solves with different (c, g), which is
/// the access pattern of the corrector problems (one patch, many local
/// right-hand sides).
class SchurKktSolver {
 public:
  /// Throws NotPositiveDefinite (A) or RankDeficientConstraints when the
  /// dense factorization of S meets a pivot below 1e-12 * max|S|.
  SchurKktSolver(const SparseMatrix& A, const SparseMatrix& B,
                 int threads = 1);

  KktSolution solve(const Vector& c, const Vector& g) const;

  Eigen::Index n() const { return a_.size(); }
  Eigen::Index m() const { return bt_.cols(); }
  const SpdFactorization& stiffness_factorization() const { return a_; }

 private:
  SpdFactorization a_;
  SparseMatrix bt_;  // B transposed, n x m
  Eigen::LDLT<Eigen::MatrixXd> s_ldlt_;
};

/// One-shot convenience wrapper around SchurKktSolver.
KktSolution kkt_solve(const KktSystem& sys);

}  // namespace holod
