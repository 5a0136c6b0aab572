#include "holod/correctors.hpp"

#include <fstream>
#include <memory>
#include <utility>

#include "holod/parallel.hpp"

namespace holod {

namespace {

// Fine interior DOFs strictly inside the patch box (coarse index bounds).
std::vector<int> patch_interior_dofs(const FineSpace& fine,
                                     const TensorMesh& coarse_mesh,
                                     const MultiIndex& lo,
                                     const MultiIndex& hi) {
  const TensorMesh& mesh = fine.mesh();
  const int ratio = mesh.cells_per_axis() / coarse_mesh.cells_per_axis();
  std::vector<int> dofs;
  for (int dof = 0; dof < fine.n_dofs(); ++dof) {
    const MultiIndex v = mesh.vertex_index(fine.vertex_of_dof(dof));
    bool inside = true;
    for (int a = 0; a < mesh.dimension(); ++a) {
      if (v[a] <= lo[a] * ratio || v[a] >= (hi[a] + 1) * ratio) {
        inside = false;
        break;
      }
    }
    if (inside) dofs.push_back(dof);
  }
  return dofs;
}

SparseMatrix extract_submatrix(const SparseMatrix& A,
                               const std::vector<int>& dofs,
                               const std::vector<int>& local_of_global) {
  const int n = static_cast<int>(dofs.size());
  std::vector<Eigen::Triplet<double>> triplets;
  for (int lc = 0; lc < n; ++lc) {
    for (SparseMatrix::InnerIterator it(A, dofs[static_cast<size_t>(lc)]); it;
         ++it) {
      const int lr = local_of_global[it.row()];
      if (lr >= 0) triplets.emplace_back(lr, lc, it.value());
    }
  }
  SparseMatrix out(n, n);
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

// Rows of the global coupling matrix that belong to the patch elements,
// restricted to the patch DOFs. Row order: (patch element, local index).
SparseMatrix extract_patch_coupling(const SparseMatrix& B,
                                    const CoarseSpace& coarse,
                                    const ElementSet& patch,
                                    const std::vector<int>& dofs,
                                    const std::vector<int>& patch_pos) {
  const int n_local = coarse.n_local();
  const int m = patch.size() * n_local;
  std::vector<Eigen::Triplet<double>> triplets;
  for (size_t lc = 0; lc < dofs.size(); ++lc) {
    for (SparseMatrix::InnerIterator it(B, dofs[lc]); it; ++it) {
      const int element = coarse.element_of_dof(static_cast<int>(it.row()));
      const int pos = patch_pos[element];
      if (pos < 0) continue;
      const int row = pos * n_local + coarse.local_of_dof(static_cast<int>(it.row()));
      triplets.emplace_back(row, static_cast<int>(lc), it.value());
    }
  }
  SparseMatrix out(m, static_cast<int>(dofs.size()));
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

struct GlobalContext {
  const FineSpace& fine;
  const CoarseSpace& coarse;
  const SparseMatrix& stiffness;
  const SparseMatrix& coupling;
};

// Shared solver for saturated patches (patch == whole domain): all such
// element problems have identical A and B, so one factorization serves
// every element.
struct SharedGlobalSolver {
  std::unique_ptr<SchurKktSolver> solver;
  std::vector<int> all_dofs;
  ElementSet all_elements;
};

SharedGlobalSolver make_global_solver(const GlobalContext& ctx, int threads) {
  SharedGlobalSolver shared;
  shared.all_dofs.resize(static_cast<size_t>(ctx.fine.n_dofs()));
  for (int i = 0; i < ctx.fine.n_dofs(); ++i) shared.all_dofs[i] = i;
  std::vector<int> all(static_cast<size_t>(ctx.coarse.mesh().n_elements()));
  for (size_t e = 0; e < all.size(); ++e) all[e] = static_cast<int>(e);
  shared.all_elements =
      ElementSet(std::move(all), ctx.coarse.mesh().n_elements());
  shared.solver = std::make_unique<SchurKktSolver>(ctx.stiffness, ctx.coupling,
                                                   threads);
  return shared;
}

ElementBasis solve_element(const GlobalContext& ctx, int K,
                           const ElementSet& patch,
                           const std::vector<int>& dofs,
                           const SchurKktSolver& solver) {
  const int n_local = ctx.coarse.n_local();
  const auto m = solver.m();

  // Position of K inside the sorted patch list.
  int pos_K = -1;
  for (int i = 0; i < patch.size(); ++i) {
    if (patch[i] == K) {
      pos_K = i;
      break;
    }
  }

  ElementBasis eb;
  eb.patch = patch;
  eb.dofs = dofs;
  eb.vectors.resize(static_cast<Eigen::Index>(dofs.size()), n_local);
  eb.multipliers.resize(m, n_local);

  const Vector c = Vector::Zero(solver.n());
  for (int j = 0; j < n_local; ++j) {
    Vector g = Vector::Zero(m);
    // The constraint right-hand side (Lambda_{K,j}, mu) is nonzero only for
    // mu = Lambda_{K,j} itself, by the element-wise Legendre orthogonality.
    g[pos_K * n_local + j] = ctx.coarse.local_mass_diagonal()[j];
    const KktSolution sol = solver.solve(c, g);
    eb.vectors.col(j) = sol.x;
    eb.multipliers.col(j) = sol.lambda;
  }
  return eb;
}

}  // namespace

CorrectorBasis::CorrectorBasis(CoarseSpace coarse, FineSpace fine, int ell,
                               std::vector<ElementBasis> elements)
    : coarse_(std::move(coarse)),
      fine_(std::move(fine)),
      ell_(ell),
      elements_(std::move(elements)) {
  if (elements_.size() != static_cast<size_t>(coarse_.mesh().n_elements())) {
    throw DimensionMismatch("CorrectorBasis: one entry per coarse element");
  }
}

Eigen::VectorXd CorrectorBasis::function(int K, int local) const {
  const ElementBasis& eb = element(K);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(fine_.n_dofs());
  for (size_t i = 0; i < eb.dofs.size(); ++i) {
    out[eb.dofs[i]] = eb.vectors(static_cast<Eigen::Index>(i), local);
  }
  return out;
}

Eigen::VectorXd CorrectorBasis::apply(
    const Eigen::VectorXd& coarse_coeffs) const {
  if (coarse_coeffs.size() != coarse_.n_dofs()) {
    throw DimensionMismatch("CorrectorBasis::apply: coefficient size mismatch");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(fine_.n_dofs());
  const int n_local = coarse_.n_local();
  for (int K = 0; K < coarse_.mesh().n_elements(); ++K) {
    const ElementBasis& eb = element(K);
    const Eigen::VectorXd local =
        eb.vectors * coarse_coeffs.segment(K * n_local, n_local);
    for (size_t i = 0; i < eb.dofs.size(); ++i) {
      out[eb.dofs[i]] += local[static_cast<Eigen::Index>(i)];
    }
  }
  return out;
}

ElementBasis compute_element_basis(int K, const FineSpace& fine,
                                   const CoarseSpace& coarse,
                                   const SparseMatrix& stiffness,
                                   const ProjectionOperator& projection,
                                   const CorrectorConfig& config) {
  if (config.ell < 1) {
    throw ConfigError("compute_element_basis: ell must be >= 1");
  }
  const GlobalContext ctx{fine, coarse, stiffness, projection.coupling()};
  const ElementSet pes = patch(coarse.mesh(), K, config.ell);

  if (pes.size() == coarse.mesh().n_elements()) {
    const SharedGlobalSolver shared = make_global_solver(ctx, config.threads);
    return solve_element(ctx, K, shared.all_elements, shared.all_dofs,
                         *shared.solver);
  }

  const auto [lo, hi] = patch_box(coarse.mesh(), K, config.ell);
  const std::vector<int> dofs =
      patch_interior_dofs(fine, coarse.mesh(), lo, hi);

  std::vector<int> local_of_global(static_cast<size_t>(fine.n_dofs()), -1);
  for (size_t i = 0; i < dofs.size(); ++i) {
    local_of_global[dofs[i]] = static_cast<int>(i);
  }
  std::vector<int> patch_pos(static_cast<size_t>(coarse.mesh().n_elements()),
                             -1);
  for (int i = 0; i < pes.size(); ++i) patch_pos[pes[i]] = i;

  const SparseMatrix A = extract_submatrix(stiffness, dofs, local_of_global);
  const SparseMatrix B = extract_patch_coupling(projection.coupling(), coarse,
                                                pes, dofs, patch_pos);
  const SchurKktSolver solver(A, B, 1);
  return solve_element(ctx, K, pes, dofs, solver);
}

CorrectorBasis compute_localized_basis(const FineSpace& fine,
                                       const CoarseSpace& coarse,
                                       const SparseMatrix& stiffness,
                                       const ProjectionOperator& projection,
                                       const CorrectorConfig& config) {
  if (config.ell < 1) {
    throw ConfigError("compute_localized_basis: ell must be >= 1");
  }
  const GlobalContext ctx{fine, coarse, stiffness, projection.coupling()};
  const int n_elements = coarse.mesh().n_elements();

  // Elements whose patch covers the whole domain share one global solver.
  bool any_saturated = false;
  for (int K = 0; K < n_elements && !any_saturated; ++K) {
    any_saturated =
        patch(coarse.mesh(), K, config.ell).size() == n_elements;
  }
  SharedGlobalSolver shared;
  if (any_saturated) shared = make_global_solver(ctx, config.threads);

  std::vector<ElementBasis> elements(static_cast<size_t>(n_elements));
  parallel_for(n_elements, config.threads, [&](int K) {
    const ElementSet pes = patch(coarse.mesh(), K, config.ell);
    if (pes.size() == n_elements) {
      elements[static_cast<size_t>(K)] = solve_element(
          ctx, K, shared.all_elements, shared.all_dofs, *shared.solver);
    } else {
      CorrectorConfig local = config;
      local.threads = 1;  // outer loop already parallel
      elements[static_cast<size_t>(K)] = compute_element_basis(
          K, fine, coarse, stiffness, projection, local);
    }
  });

  return CorrectorBasis(coarse, fine, config.ell, std::move(elements));
}

CorrectorBasis compute_ideal_basis(const FineSpace& fine,
                                   const CoarseSpace& coarse,
                                   const SparseMatrix& stiffness,
                                   const ProjectionOperator& projection,
                                   const CorrectorConfig& config) {
  if (fine.n_dofs() > config.dof_cap) {
    throw ConfigError(
        "compute_ideal_basis: " + std::to_string(fine.n_dofs()) +
        " fine DOFs exceed the configured cap of " +
        std::to_string(config.dof_cap) +
        "; the ideal basis is a validation tool, use a coarser fine mesh");
  }
  const GlobalContext ctx{fine, coarse, stiffness, projection.coupling()};
  const SharedGlobalSolver shared = make_global_solver(ctx, config.threads);

  const int n_elements = coarse.mesh().n_elements();
  std::vector<ElementBasis> elements(static_cast<size_t>(n_elements));
  parallel_for(n_elements, config.threads, [&](int K) {
    elements[static_cast<size_t>(K)] = solve_element(
        ctx, K, shared.all_elements, shared.all_dofs, *shared.solver);
  });

  return CorrectorBasis(coarse, fine, CorrectorBasis::kIdeal,
                        std::move(elements));
}

namespace {

uint64_t fnv1a(const void* data, size_t size, uint64_t hash) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < size; ++i) {
    hash ^= bytes[i];
    hash *= 1099511628211ull;
  }
  return hash;
}

constexpr uint64_t kBasisMagic = 0x484f4c4f44425631ull;  // "HOLODBV1"

template <typename T>
void write_pod(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
bool read_pod(std::istream& in, T& value) {
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  return static_cast<bool>(in);
}

}  // namespace

uint64_t basis_cache_key(const Coefficient& coeff, const CoarseSpace& coarse,
                         const FineSpace& fine, int ell) {
  uint64_t hash = 14695981039346656037ull;
  const int32_t header[6] = {coeff.mesh().dimension(),
                             coeff.mesh().cells_per_axis(),
                             coarse.mesh().cells_per_axis(),
                             coarse.degree(),
                             fine.mesh().cells_per_axis(),
                             ell};
  hash = fnv1a(header, sizeof(header), hash);
  hash = fnv1a(coeff.values().data(),
               sizeof(double) * static_cast<size_t>(coeff.values().size()),
               hash);
  return hash;
}

void save_basis(const std::string& path, uint64_t key,
                const CorrectorBasis& basis) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("save_basis: cannot open " + path);
  write_pod(out, kBasisMagic);
  write_pod(out, key);
  const int32_t header[5] = {basis.coarse().mesh().dimension(),
                             basis.coarse().mesh().cells_per_axis(),
                             basis.coarse().degree(),
                             basis.fine().mesh().cells_per_axis(),
                             basis.ell()};
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  for (int K = 0; K < basis.coarse().mesh().n_elements(); ++K) {
    const ElementBasis& eb = basis.element(K);
    write_pod(out, static_cast<int32_t>(eb.patch.size()));
    for (int e : eb.patch) write_pod(out, static_cast<int32_t>(e));
    write_pod(out, static_cast<int32_t>(eb.dofs.size()));
    for (int d : eb.dofs) write_pod(out, static_cast<int32_t>(d));
    out.write(reinterpret_cast<const char*>(eb.vectors.data()),
              static_cast<std::streamsize>(sizeof(double)) * eb.vectors.size());
    out.write(
        reinterpret_cast<const char*>(eb.multipliers.data()),
        static_cast<std::streamsize>(sizeof(double)) * eb.multipliers.size());
  }
  if (!out) throw ConfigError("save_basis: write failed for " + path);
}

std::optional<CorrectorBasis> load_basis(const std::string& path,
                                         uint64_t expected_key) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  uint64_t magic = 0, key = 0;
  if (!read_pod(in, magic) || magic != kBasisMagic) return std::nullopt;
  if (!read_pod(in, key) || key != expected_key) return std::nullopt;
  int32_t header[5];
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!in) return std::nullopt;

  CoarseSpace coarse(TensorMesh(header[0], header[1]), header[2]);
  FineSpace fine(TensorMesh(header[0], header[3]));
  const int ell = header[4];
  const int n_local = coarse.n_local();

  std::vector<ElementBasis> elements;
  elements.reserve(static_cast<size_t>(coarse.mesh().n_elements()));
  for (int K = 0; K < coarse.mesh().n_elements(); ++K) {
    int32_t patch_size = 0;
    if (!read_pod(in, patch_size)) return std::nullopt;
    std::vector<int> patch_elems(static_cast<size_t>(patch_size));
    for (auto& e : patch_elems) {
      int32_t v = 0;
      if (!read_pod(in, v)) return std::nullopt;
      e = v;
    }
    int32_t n_dofs = 0;
    if (!read_pod(in, n_dofs)) return std::nullopt;
    ElementBasis eb;
    eb.patch = ElementSet(std::move(patch_elems),
                          coarse.mesh().n_elements());
    eb.dofs.resize(static_cast<size_t>(n_dofs));
    for (auto& d : eb.dofs) {
      int32_t v = 0;
      if (!read_pod(in, v)) return std::nullopt;
      d = v;
    }
    eb.vectors.resize(n_dofs, n_local);
    in.read(reinterpret_cast<char*>(eb.vectors.data()),
            static_cast<std::streamsize>(sizeof(double)) * eb.vectors.size());
    eb.multipliers.resize(static_cast<Eigen::Index>(patch_size) * n_local,
                          n_local);
    in.read(
        reinterpret_cast<char*>(eb.multipliers.data()),
        static_cast<std::streamsize>(sizeof(double)) * eb.multipliers.size());
    if (!in) return std::nullopt;
    elements.push_back(std::move(eb));
  }
  return CorrectorBasis(std::move(coarse), std::move(fine), ell,
                        std::move(elements));
}

}  // namespace holod
