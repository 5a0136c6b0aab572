#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "holod/assembly.hpp"
#include "holod/linalg.hpp"
#include "holod/mesh.hpp"
#include "holod/spaces.hpp"

namespace holod {

struct CorrectorConfig {
  int ell = 1;           ///< patch radius (ignored by the ideal computation)
  int threads = 1;       ///< worker threads for patch problems
  int dof_cap = 200000;  ///< refusal threshold for global (ideal) solves
};

/// Basis vectors of one coarse element K: the (p+1)^d fine-space vectors
/// supported on the interior DOFs of N^ell(K), plus their Lagrange
/// multipliers (kept for constraint-conditioning diagnostics).
struct ElementBasis {
  ElementSet patch;             ///< coarse elements of N^ell(K)
  std::vector<int> dofs;        ///< global fine interior DOFs, sorted
  Eigen::MatrixXd vectors;      ///< dofs.size() x n_local
  Eigen::MatrixXd multipliers;  ///< (patch.size() * n_local) x n_local
};

/// The multiscale basis: per coarse element K and local Legendre index j,
/// the energy-minimal fine function whose L2 projection is Lambda_{K,j}.
class CorrectorBasis {
 public:
  /// ell value marking a basis computed with global (unlocalized) patches.
  static constexpr int kIdeal = -1;

  CorrectorBasis(CoarseSpace coarse, FineSpace fine, int ell,
                 std::vector<ElementBasis> elements);

  const CoarseSpace& coarse() const { return coarse_; }
  const FineSpace& fine() const { return fine_; }
  int ell() const { return ell_; }
  bool is_ideal() const { return ell_ == kIdeal; }
  int n_functions() const { return coarse_.n_dofs(); }

  const ElementBasis& element(int K) const {
    return elements_[static_cast<size_t>(K)];
  }

  /// Single basis function as a dense global fine vector.
  Eigen::VectorXd function(int K, int local) const;

  /// R^ell v_H: the linear combination of basis functions with the given
  /// coarse coefficients.
  Eigen::VectorXd apply(const Eigen::VectorXd& coarse_coeffs) const;

 private:
  CoarseSpace coarse_;
  FineSpace fine_;
  int ell_;
  std::vector<ElementBasis> elements_;
};

/// Localized corrector basis: for every coarse element K, solves the
/// saddle point problem on N^ell(K) with constraints for all coarse
/// elements of the patch; one patch stiffness factorization is reused for
/// the (p+1)^d local right-hand sides. Patches are processed independently
/// (parallel map, deterministic merge by element index).
CorrectorBasis compute_localized_basis(const FineSpace& fine,
                                       const CoarseSpace& coarse,
                                       const SparseMatrix& stiffness,
                                       const ProjectionOperator& projection,
                                       const CorrectorConfig& config);

/// Ideal (global) corrector basis; validation tool, guarded by
/// config.dof_cap.
CorrectorBasis compute_ideal_basis(const FineSpace& fine,
                                   const CoarseSpace& coarse,
                                   const SparseMatrix& stiffness,
                                   const ProjectionOperator& projection,
                                   const CorrectorConfig& config);

/// Basis vectors of a single element (patch of radius config.ell, or the
/// whole domain when the patch saturates).
ElementBasis compute_element_basis(int K, const FineSpace& fine,
                                   const CoarseSpace& coarse,
                                   const SparseMatrix& stiffness,
                                   const ProjectionOperator& projection,
                                   const CorrectorConfig& config);

/// Cache key for on-disk reuse: hash of the coefficient field and the
/// discretization parameters (H, h, p, ell).
uint64_t basis_cache_key(const Coefficient& coeff, const CoarseSpace& coarse,
                         const FineSpace& fine, int ell);

void save_basis(const std::string& path, uint64_t key,
                const CorrectorBasis& basis);

/// Returns the cached basis, or nullopt when the file is missing or was
/// written for a different key.
std::optional<CorrectorBasis> load_basis(const std::string& path,
                                         uint64_t expected_key);

}  // namespace holod
