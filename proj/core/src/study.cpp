#include "holod/study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "holod/parallel.hpp"

namespace holod {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

std::string format_double(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

int load_quadrature_order(int max_degree) {
  return std::max(4, (max_degree + 2 + 1) / 2 + 2);
}

int effective_ell(int ell, int coarse_cells) {
  return ell == 0 ? coarse_cells : ell;
}

std::string study_name(StudyKind kind) {
  switch (kind) {
    case StudyKind::Single: return "single";
    case StudyKind::HSweep: return "h-sweep";
    case StudyKind::EllSweep: return "ell-sweep";
    case StudyKind::Decay: return "decay";
  }
  return "?";
}

struct SharedSetup {
  FineSpace fine;
  Coefficient coefficient;
  AssembledProblem problem;
  ReferenceSolution reference;
  int threads;
};

SharedSetup prepare(const StudyConfig& config, bool with_reference) {
  const int threads =
      config.threads > 0 ? config.threads : default_thread_count();
  const int max_p =
      *std::max_element(config.degrees.begin(), config.degrees.end());
  FineSpace fine(TensorMesh(config.dimension, config.fine_cells));
  Coefficient coeff = generate_coefficient(config.model, config.dimension);
  AssembledProblem problem = assemble_problem(
      fine, coeff, make_rhs(config.rhs), load_quadrature_order(max_p));
  ReferenceSolution ref;
  if (with_reference) ref = solve_reference(problem);
  return SharedSetup{std::move(fine), std::move(coeff), std::move(problem),
                     std::move(ref), threads};
}

std::vector<std::string> config_metadata(const StudyConfig& config) {
  std::ostringstream model;
  switch (config.model.kind) {
    case CoefficientKind::RoughUniform:
      model << "model=rough-uniform lo=" << format_double(config.model.lo)
            << " hi=" << format_double(config.model.hi);
      break;
    case CoefficientKind::Constant:
      model << "model=constant value=" << format_double(config.model.lo);
      break;
    case CoefficientKind::File:
      model << "model=file path=" << config.model.file;
      break;
  }
  std::ostringstream rhs;
  switch (config.rhs.kind) {
    case RhsKind::F1: rhs << "rhs=f1"; break;
    case RhsKind::F2: rhs << "rhs=f2"; break;
    case RhsKind::Constant:
      rhs << "rhs=const value=" << format_double(config.rhs.value);
      break;
    case RhsKind::Expression: rhs << "rhs=expr " << config.rhs.expression; break;
  }
  const int max_p =
      *std::max_element(config.degrees.begin(), config.degrees.end());
  std::ostringstream quad;
  quad << "load_quad_order=" << load_quadrature_order(max_p);
  return {model.str(), rhs.str(), quad.str()};
}

StudyRow base_row(const StudyConfig& config, const std::string& study,
                  int coarse_cells, int p, int ell) {
  StudyRow row;
  row.study = study;
  row.dim = config.dimension;
  row.H = 1.0 / coarse_cells;
  row.h = 1.0 / config.fine_cells;
  row.eps = 1.0 / config.model.eps_cells;
  row.p = p;
  row.ell = ell;
  row.seed = config.model.seed;
  return row;
}

// Runs one (H, p, ell) point against the shared reference. Returns a row
// with empty error fields when the solver reports a numerical failure.
StudyRow run_point(const StudyConfig& config, const SharedSetup& setup,
                   const std::string& study, int coarse_cells, int p,
                   int ell) {
  StudyRow row = base_row(config, study, coarse_cells, p, ell);
  const auto start = Clock::now();
  try {
    CoarseSpace coarse(TensorMesh(config.dimension, coarse_cells), p);
    ProjectionOperator proj = assemble_projection(setup.fine, coarse);
    CorrectorConfig cc{ell, setup.threads, config.dof_cap};

    std::optional<CorrectorBasis> basis;
    std::string cache_path;
    uint64_t cache_key = 0;
    if (!config.basis_cache_dir.empty()) {
      cache_key = basis_cache_key(setup.coefficient, coarse, setup.fine, ell);
      char name[32];
      std::snprintf(name, sizeof(name), "/basis_%016llx.bin",
                    static_cast<unsigned long long>(cache_key));
      cache_path = config.basis_cache_dir + name;
      basis = load_basis(cache_path, cache_key);
    }
    if (!basis) {
      basis = compute_localized_basis(setup.fine, coarse,
                                      setup.problem.stiffness, proj, cc);
      if (!cache_path.empty()) save_basis(cache_path, cache_key, *basis);
    }
    MultiscaleSolution ms =
        solve_multiscale(*basis, setup.problem, setup.threads);
    const ErrorReport er = error_report(setup.problem, setup.reference, ms);
    row.rel_energy_err = er.rel_energy;
    row.rel_l2_err = er.rel_l2;
  } catch (const NumericalError& err) {
    std::fprintf(stderr, "row failed (H=1/%d p=%d ell=%d): %s\n", coarse_cells,
                 p, ell, err.what());
  }
  row.wall_ms = elapsed_ms(start);
  return row;
}

// Pre-stagnation prefix for slope fitting: the points strictly above the
// 10% band around the sweep minimum. Points inside the band sit on the
// error floor of the underlying method and would flatten the fit.
size_t pre_stagnation_count(const std::vector<double>& errors) {
  const double min_err = *std::min_element(errors.begin(), errors.end());
  size_t count = 0;
  while (count < errors.size() && errors[count] > 1.1 * min_err) ++count;
  return std::max<size_t>(count, 2);
}

}  // namespace

int n_failed_rows(const StudyResult& result) {
  int failed = 0;
  for (const StudyRow& row : result.rows) {
    if (!row.rel_energy_err.has_value()) ++failed;
  }
  return failed;
}

void validate_config(const StudyConfig& config) {
  if (config.dimension != 1 && config.dimension != 2) {
    throw ConfigError("config: dimension must be 1 or 2");
  }
  if (config.coarse_cells.empty() || config.degrees.empty() ||
      config.ells.empty()) {
    throw ConfigError("config: H, p, and ell sweep lists must be nonempty");
  }
  // Dyadic sizes are enforced by the mesh constructors.
  TensorMesh fine(config.dimension, config.fine_cells);
  for (int n : config.coarse_cells) {
    TensorMesh coarse(config.dimension, n);
    if (n > config.fine_cells) {
      throw ConfigError("config: coarse mesh finer than fine mesh");
    }
  }
  for (int p : config.degrees) {
    if (p < 0) throw ConfigError("config: degree must be >= 0");
  }
  for (int ell : config.ells) {
    if (ell < 0) throw ConfigError("config: ell must be >= 1 (0 = saturating)");
  }
  if (config.model.kind == CoefficientKind::RoughUniform) {
    if (config.fine_cells < config.model.eps_cells) {
      throw ConfigError("config: need h <= eps (fine mesh resolves the field)");
    }
    for (int n : config.coarse_cells) {
      if (config.model.eps_cells < n) {
        throw ConfigError("config: need eps <= H for the rough model");
      }
    }
  }
}

StudyResult run_single(const StudyConfig& config) {
  validate_config(config);
  const SharedSetup setup = prepare(config, true);
  StudyResult result;
  result.metadata = config_metadata(config);
  const int n_H = config.coarse_cells.front();
  result.rows.push_back(run_point(config, setup, study_name(StudyKind::Single),
                                  n_H, config.degrees.front(),
                                  effective_ell(config.ells.front(), n_H)));
  return result;
}

StudyResult run_h_sweep(const StudyConfig& config) {
  validate_config(config);
  const SharedSetup setup = prepare(config, true);
  StudyResult result;
  result.metadata = config_metadata(config);
  for (int p : config.degrees) {
    for (int ell : config.ells) {
      std::optional<double> prev_err;
      double prev_H = 0.0;
      for (int n_H : config.coarse_cells) {
        StudyRow row = run_point(config, setup, study_name(StudyKind::HSweep),
                                 n_H, p, effective_ell(ell, n_H));
        if (prev_err && row.rel_energy_err) {
          row.eoc = std::log(*prev_err / *row.rel_energy_err) /
                    std::log(prev_H / row.H);
        }
        prev_err = row.rel_energy_err;
        prev_H = row.H;
        result.rows.push_back(std::move(row));
      }
    }
  }
  return result;
}

StudyResult run_ell_sweep(const StudyConfig& config) {
  validate_config(config);
  const SharedSetup setup = prepare(config, true);
  StudyResult result;
  result.metadata = config_metadata(config);
  bool all_stagnated = true;
  bool any_series = false;
  for (int p : config.degrees) {
    for (int n_H : config.coarse_cells) {
      std::vector<size_t> series;
      std::vector<double> errors;
      std::vector<int> ells;
      for (int ell : config.ells) {
        StudyRow row = run_point(config, setup,
                                 study_name(StudyKind::EllSweep), n_H, p,
                                 effective_ell(ell, n_H));
        result.rows.push_back(std::move(row));
        series.push_back(result.rows.size() - 1);
        const StudyRow& stored = result.rows.back();
        if (stored.rel_energy_err && *stored.rel_energy_err > 0.0) {
          errors.push_back(*stored.rel_energy_err);
          ells.push_back(stored.ell);
        }
      }
      if (errors.size() >= 2) {
        any_series = true;
        const size_t keep = std::min(pre_stagnation_count(errors),
                                     errors.size());
        const double slope =
            fit_decay(std::vector<double>(errors.begin(),
                                          errors.begin() +
                                              static_cast<long>(keep)),
                      std::vector<int>(ells.begin(),
                                       ells.begin() + static_cast<long>(keep)));
        for (size_t idx : series) result.rows[idx].decay_slope = slope;
        const double last = errors[errors.size() - 1];
        const double before = errors[errors.size() - 2];
        if (std::abs(last - before) > 0.1 * before) all_stagnated = false;
      }
    }
  }
  result.stagnated = any_series && all_stagnated;
  return result;
}

StudyResult run_decay_study(const StudyConfig& config) {
  validate_config(config);
  const int threads =
      config.threads > 0 ? config.threads : default_thread_count();
  const int dim = config.dimension;
  FineSpace fine(TensorMesh(dim, config.fine_cells));
  if (fine.n_dofs() > config.dof_cap) {
    throw ConfigError(
        "decay study needs the ideal basis on " +
        std::to_string(fine.n_dofs()) +
        " fine DOFs, above the cap of " + std::to_string(config.dof_cap) +
        "; use a smaller fine mesh or raise --dof-cap");
  }
  const Coefficient coeff = generate_coefficient(config.model, dim);
  const SparseMatrix stiffness = assemble_stiffness(fine, coeff);
  const SparseMatrix mass = assemble_mass(fine);

  const int n_H = config.coarse_cells.front();
  const TensorMesh coarse_mesh(dim, n_H);
  // Central element; for n_H = 16 this is the square with lower corner
  // (0.4375, 0.4375).
  MultiIndex central{n_H / 2 - 1, dim == 2 ? n_H / 2 - 1 : 0};
  if (n_H == 1) central = {0, 0};
  const int K = coarse_mesh.element_at(central);

  StudyResult result;
  result.metadata = config_metadata(config);
  for (int p : config.degrees) {
    CoarseSpace coarse(coarse_mesh, p);
    ProjectionOperator proj = assemble_projection(fine, coarse);
    CorrectorConfig ideal_cfg{n_H, threads, config.dof_cap};
    const ElementBasis ideal =
        compute_element_basis(K, fine, coarse, stiffness, proj, ideal_cfg);
    const int lowest = 0;
    const int highest = coarse.n_local() - 1;

    auto embed = [&](const ElementBasis& eb, int j) {
      Eigen::VectorXd out = Eigen::VectorXd::Zero(fine.n_dofs());
      for (size_t i = 0; i < eb.dofs.size(); ++i) {
        out[eb.dofs[i]] = eb.vectors(static_cast<Eigen::Index>(i), j);
      }
      return out;
    };

    struct Series {
      std::string study;
      int local;
      std::vector<size_t> rows;
      std::vector<double> errors;
      std::vector<int> ells;
    };
    Series lows{"decay-lowest", lowest, {}, {}, {}};
    Series highs{"decay-highest", highest, {}, {}, {}};

    for (int ell : config.ells) {
      const int eff = effective_ell(ell, n_H);
      const auto start = Clock::now();
      CorrectorConfig cc{eff, threads, config.dof_cap};
      const ElementBasis localized =
          compute_element_basis(K, fine, coarse, stiffness, proj, cc);
      const double wall = elapsed_ms(start);
      for (Series* series : {&lows, &highs}) {
        const int j = series->local;
        const Eigen::VectorXd full = embed(ideal, j);
        const Eigen::VectorXd diff = full - embed(localized, j);
        StudyRow row = base_row(config, series->study, n_H, p, eff);
        row.wall_ms = wall / 2.0;
        const double denom_a = energy_norm(stiffness, full);
        const double denom_m = l2_norm(mass, full);
        row.rel_energy_err = energy_norm(stiffness, diff) / denom_a;
        row.rel_l2_err = l2_norm(mass, diff) / denom_m;
        result.rows.push_back(std::move(row));
        series->rows.push_back(result.rows.size() - 1);
        const StudyRow& stored = result.rows.back();
        if (*stored.rel_energy_err > 1e-12) {
          series->errors.push_back(*stored.rel_energy_err);
          series->ells.push_back(eff);
        }
      }
    }
    for (const Series* series : {&lows, &highs}) {
      if (series->errors.size() >= 2) {
        const double slope = fit_decay(series->errors, series->ells);
        for (size_t idx : series->rows) result.rows[idx].decay_slope = slope;
      }
    }
  }
  return result;
}

std::vector<double> fit_eoc(const std::vector<double>& errors,
                            const std::vector<double>& Hs) {
  if (errors.size() != Hs.size() || errors.size() < 2) {
    throw ConfigError("fit_eoc: need matching lists with >= 2 points");
  }
  for (double e : errors) {
    if (!(e > 0.0)) throw ConfigError("fit_eoc: errors must be positive");
  }
  std::vector<double> out;
  for (size_t i = 0; i + 1 < errors.size(); ++i) {
    out.push_back(std::log(errors[i] / errors[i + 1]) /
                  std::log(Hs[i] / Hs[i + 1]));
  }
  return out;
}

double fit_decay(const std::vector<double>& errors,
                 const std::vector<int>& ells) {
  if (errors.size() != ells.size() || errors.size() < 2) {
    throw ConfigError("fit_decay: need matching lists with >= 2 points");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(errors.size());
  for (size_t i = 0; i < errors.size(); ++i) {
    if (!(errors[i] > 0.0)) {
      throw ConfigError("fit_decay: errors must be positive");
    }
    const double x = ells[i];
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double phi(int p, int k) {
  if (p < 0 || k < 0 || k > p + 1) {
    throw ConfigError("phi: need 0 <= k <= p+1");
  }
  // (p+1-k)! / (p+1+k)! = 1 / prod_{i=p+2-k}^{p+1+k} i
  double denom = 1.0;
  for (int i = p + 2 - k; i <= p + 1 + k; ++i) denom *= i;
  return 1.0 / std::sqrt(denom);
}

namespace {

constexpr const char* kHeader =
    "study,dim,H,h,eps,p,ell,seed,rel_energy_err,rel_l2_err,eoc,decay_slope,"
    "wall_ms";

std::string format_optional(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::optional<double> parse_optional(const std::string& field) {
  if (field.empty()) return std::nullopt;
  return std::stod(field);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(current);
  return fields;
}

}  // namespace

std::string serialize_csv(const StudyResult& result) {
  std::ostringstream out;
  for (const std::string& line : result.metadata) {
    out << "# meta: " << line << "\n";
  }
  // Per-degree annotations are derived from the rows, so serialization is a
  // pure function of the result.
  std::set<int> degrees;
  for (const StudyRow& row : result.rows) degrees.insert(row.p);
  for (int p : degrees) {
    out << "# p=" << p << " coupling_quad_order=" << (p + 2 + 1) / 2
        << " phi(p,p+1)=" << format_double(phi(p, p + 1)) << "\n";
  }
  out << "# stagnated=" << (result.stagnated ? 1 : 0) << "\n";
  out << kHeader << "\n";
  for (const StudyRow& row : result.rows) {
    out << row.study << "," << row.dim << "," << format_double(row.H) << ","
        << format_double(row.h) << "," << format_double(row.eps) << ","
        << row.p << "," << row.ell << "," << row.seed << ","
        << format_optional(row.rel_energy_err) << ","
        << format_optional(row.rel_l2_err) << "," << format_optional(row.eoc)
        << "," << format_optional(row.decay_slope) << ","
        << format_double(row.wall_ms) << "\n";
  }
  return out.str();
}

StudyResult parse_csv(const std::string& text) {
  StudyResult result;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string stagnated_key = "# stagnated=";
      const std::string meta_key = "# meta: ";
      if (line.rfind(stagnated_key, 0) == 0) {
        result.stagnated = line.substr(stagnated_key.size()) == "1";
      } else if (line.rfind(meta_key, 0) == 0) {
        result.metadata.push_back(line.substr(meta_key.size()));
      }
      continue;
    }
    if (!header_seen) {
      if (line != kHeader) {
        throw ConfigError("parse_csv: unexpected header '" + line + "'");
      }
      header_seen = true;
      continue;
    }
    const std::vector<std::string> f = split_fields(line);
    if (f.size() != 13) {
      throw ConfigError("parse_csv: expected 13 fields, got " +
                        std::to_string(f.size()));
    }
    StudyRow row;
    row.study = f[0];
    row.dim = std::stoi(f[1]);
    row.H = std::stod(f[2]);
    row.h = std::stod(f[3]);
    row.eps = std::stod(f[4]);
    row.p = std::stoi(f[5]);
    row.ell = std::stoi(f[6]);
    row.seed = std::stoull(f[7]);
    row.rel_energy_err = parse_optional(f[8]);
    row.rel_l2_err = parse_optional(f[9]);
    row.eoc = parse_optional(f[10]);
    row.decay_slope = parse_optional(f[11]);
    row.wall_ms = std::stod(f[12]);
    result.rows.push_back(std::move(row));
  }
  if (!header_seen) throw ConfigError("parse_csv: missing header");
  return result;
}

std::string strip_timing_column(const std::string& csv) {
  std::istringstream in(csv);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#' && line != kHeader) {
      const size_t last_comma = line.find_last_of(',');
      if (last_comma != std::string::npos) line.resize(last_comma + 1);
    }
    out << line << "\n";
  }
  return out.str();
}

}  // namespace holod
