#pragma once

#include <optional>
#include <string>
#include <vector>

#include "holod/model.hpp"
#include "holod/multiscale.hpp"

namespace holod {

enum class StudyKind { Single, HSweep, EllSweep, Decay };

struct StudyConfig {
  StudyKind kind = StudyKind::Single;
  int dimension = 2;
  std::vector<int> coarse_cells;  ///< 1/H per sweep point
  std::vector<int> degrees;       ///< p per sweep point
  std::vector<int> ells;          ///< ell per sweep point; 0 = saturating
  int fine_cells = 128;           ///< 1/h
  ModelSpec model;
  RhsSpec rhs;
  int threads = 0;  ///< 0 = hardware concurrency
  int dof_cap = 200000;
  /// When nonempty, corrector bases are cached here keyed by the
  /// coefficient hash and (H, h, p, ell); reruns skip recomputation.
  std::string basis_cache_dir;
};

/// One CSV row. Optional fields serialize as empty cells; a row whose error
/// fields are empty marks a numerically failed sweep point.
struct StudyRow {
  std::string study;
  int dim = 2;
  double H = 0.0;
  double h = 0.0;
  double eps = 0.0;
  int p = 0;
  int ell = 0;
  uint64_t seed = 0;
  std::optional<double> rel_energy_err;
  std::optional<double> rel_l2_err;
  std::optional<double> eoc;
  std::optional<double> decay_slope;
  double wall_ms = 0.0;

  bool operator==(const StudyRow&) const = default;
};

struct StudyResult {
  std::vector<StudyRow> rows;
  /// For ell sweeps: true when every series' last two errors agree within
  /// 10% (the localization error has stopped improving).
  bool stagnated = false;
  /// Provenance the fixed row schema cannot carry (coefficient model,
  /// right-hand side, quadrature orders); serialized as '# meta:' comments.
  std::vector<std::string> metadata;

  bool operator==(const StudyResult&) const = default;
};

int n_failed_rows(const StudyResult& result);

/// Throws ConfigError for empty sweeps, non-dyadic sizes, or violated mesh
/// orderings (h <= eps, and eps <= H for rough models).
void validate_config(const StudyConfig& config);

StudyResult run_single(const StudyConfig& config);
StudyResult run_h_sweep(const StudyConfig& config);
StudyResult run_ell_sweep(const StudyConfig& config);
StudyResult run_decay_study(const StudyConfig& config);

/// Pairwise empirical orders: log(e_i/e_{i+1}) / log(H_i/H_{i+1}).
std::vector<double> fit_eoc(const std::vector<double>& errors,
                            const std::vector<double>& Hs);

/// Least-squares slope of ln(error) against ell.
double fit_decay(const std::vector<double>& errors,
                 const std::vector<int>& ells);

/// Projection-error constant of the coarse space,
/// Phi(p,k) = ((p+1-k)! / (p+1+k)!)^(1/2); used to annotate predicted-rate
/// reference lines in study output.
double phi(int p, int k);

/// Header: study,dim,H,h,eps,p,ell,seed,rel_energy_err,rel_l2_err,eoc,
/// decay_slope,wall_ms. Doubles are written with full precision, so
/// parse(serialize(r)) == r.
std::string serialize_csv(const StudyResult& result);
StudyResult parse_csv(const std::string& text);

/// Blanks the wall_ms column; used when comparing runs for determinism.
std::string strip_timing_column(const std::string& csv);

}  // namespace holod
