#pragma once

#include <cstdint>

#include "holod/assembly.hpp"
#include "holod/correctors.hpp"
#include "holod/linalg.hpp"

namespace holod {

struct ReferenceSolution {
  Eigen::VectorXd u;
  double residual = 0.0;  ///< relative algebraic residual
};

/// Direct fine-scale Galerkin solve; the reference for all error reports.
ReferenceSolution solve_reference(const AssembledProblem& problem);

/// Inputs needed to re-run a solve; the seed and eps fields are filled by
/// the study driver (they are not derivable from the assembled data).
struct Provenance {
  int dim = 0;
  double H = 0.0;
  double h = 0.0;
  double eps = 0.0;
  int p = 0;
  int ell = 0;
  uint64_t seed = 0;
  int coupling_quad_order = 0;
  int load_quad_order = 0;
};

struct MultiscaleSolution {
  Eigen::VectorXd coarse_coefficients;
  Eigen::VectorXd fine;  ///< basis.apply(coarse_coefficients)
  Provenance provenance;
  bool resolution_warning = false;  ///< h p^2 / H > 1
};

/// Galerkin solve in the corrector basis: with C the matrix of basis
/// vectors, solves (C' A C) x = C' f. Emits a warning (and sets the flag)
/// when the resolution condition h <= H/p^2 is violated; throws
/// SingularCoarseSystem when the coarse stiffness cannot be factorized.
MultiscaleSolution solve_multiscale(const CorrectorBasis& basis,
                                    const AssembledProblem& problem,
                                    int threads = 1);

/// C' A C as a sparse matrix; exposed for invariant checks in tests.
SparseMatrix assemble_coarse_stiffness(const CorrectorBasis& basis,
                                       const SparseMatrix& stiffness);

struct ErrorReport {
  double rel_energy = 0.0;
  double rel_l2 = 0.0;
};

/// Relative energy and L2 errors of the multiscale solution against the
/// fine reference. Throws ConfigError when the reference norm vanishes.
ErrorReport error_report(const AssembledProblem& problem,
                         const ReferenceSolution& reference,
                         const MultiscaleSolution& solution);

}  // namespace holod
