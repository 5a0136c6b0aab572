// Command-line driver: seeded model generation, H/p/ell sweeps, and basis
// decay studies with CSV output.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "holod/model.hpp"
#include "holod/study.hpp"

namespace {

int cells_from_mesh_size(double size, const std::string& flag) {
  if (!(size > 0.0) || size > 1.0) {
    throw holod::ConfigError(flag + ": mesh size must be in (0, 1]");
  }
  const double cells = 1.0 / size;
  const int n = static_cast<int>(std::lround(cells));
  if (std::abs(cells - n) > 1e-9 * cells || (n & (n - 1)) != 0) {
    throw holod::ConfigError(flag + ": 1/" + std::to_string(size) +
                             " must be a power of two");
  }
  return n;
}

struct CommonFlags {
  int dim = 2;
  std::vector<double> H{0.125};
  double h = 1.0 / 128;
  double eps = 1.0 / 32;
  std::vector<int> p{1};
  std::vector<int> ell{2};
  std::string model = "rough-a1";
  std::string rhs = "f1";
  double value = 1.0;
  double lo = 0.0;
  double hi = 0.0;
  std::string coeff_file;
  uint64_t seed = 1;
  std::string out;
  int threads = 0;
  int dof_cap = 200000;
  std::string basis_cache;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  // --h is taken by the fine mesh size, so help is --help only
  cmd->set_help_flag("--help", "Print help");
  cmd->add_option("--dim", flags.dim, "Spatial dimension (1 or 2)")
      ->check(CLI::IsMember({1, 2}));
  cmd->add_option("--H", flags.H, "Coarse mesh size(s), e.g. 0.25 0.125")
      ->delimiter(',');
  cmd->add_option("--h", flags.h, "Fine mesh size");
  cmd->add_option("--eps", flags.eps, "Coefficient mesh size");
  cmd->add_option("--p", flags.p, "Polynomial degree(s)")->delimiter(',');
  cmd->add_option("--ell", flags.ell,
                  "Localization parameter(s); 0 = saturating patches")
      ->delimiter(',');
  cmd->add_option("--model", flags.model,
                  "Coefficient model: rough-a1 | rough-a2 | constant | file")
      ->check(CLI::IsMember({"rough-a1", "rough-a2", "constant", "file"}));
  cmd->add_option("--rhs", flags.rhs,
                  "Right-hand side: f1 | f2 | const | expr=<string>");
  cmd->add_option("--value", flags.value, "Value for --model constant");
  cmd->add_option("--lo", flags.lo, "Override lower bound of the rough range");
  cmd->add_option("--hi", flags.hi, "Override upper bound of the rough range");
  cmd->add_option("--coeff-file", flags.coeff_file,
                  "Coefficient file for --model file");
  cmd->add_option("--seed", flags.seed, "Seed for the rough coefficient");
  cmd->add_option("--out", flags.out, "Output CSV path (default: stdout)");
  cmd->add_option("--threads", flags.threads,
                  "Worker threads (0 = hardware concurrency)");
  cmd->add_option("--dof-cap", flags.dof_cap,
                  "Fine-DOF cap for global (ideal) solves");
  cmd->add_option("--basis-cache", flags.basis_cache,
                  "Directory for the on-disk corrector basis cache");
}

holod::ModelSpec model_spec_from_flags(const CommonFlags& flags) {
  holod::ModelSpec spec;
  spec.eps_cells = cells_from_mesh_size(flags.eps, "--eps");
  spec.seed = flags.seed;
  if (flags.model == "rough-a1") {
    spec.kind = holod::CoefficientKind::RoughUniform;
    spec.lo = 0.25;
    spec.hi = 2.5;
  } else if (flags.model == "rough-a2") {
    spec.kind = holod::CoefficientKind::RoughUniform;
    spec.lo = 1.0;
    spec.hi = 4.0;
  } else if (flags.model == "constant") {
    spec.kind = holod::CoefficientKind::Constant;
    spec.lo = flags.value;
    spec.hi = flags.value;
    spec.eps_cells = 1;
  } else {
    spec.kind = holod::CoefficientKind::File;
    if (flags.coeff_file.empty()) {
      throw holod::ConfigError("--model file requires --coeff-file");
    }
    spec.file = flags.coeff_file;
  }
  if (flags.lo > 0.0) spec.lo = flags.lo;
  if (flags.hi > 0.0) spec.hi = flags.hi;
  return spec;
}

holod::StudyConfig config_from_flags(const CommonFlags& flags,
                                     holod::StudyKind kind) {
  holod::StudyConfig config;
  config.kind = kind;
  config.dimension = flags.dim;
  for (double H : flags.H) {
    config.coarse_cells.push_back(cells_from_mesh_size(H, "--H"));
  }
  config.degrees = flags.p;
  config.ells = flags.ell;
  config.fine_cells = cells_from_mesh_size(flags.h, "--h");
  config.model = model_spec_from_flags(flags);
  config.rhs = holod::parse_rhs_spec(flags.rhs);
  config.threads = flags.threads;
  config.dof_cap = flags.dof_cap;
  config.basis_cache_dir = flags.basis_cache;
  return config;
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw holod::ConfigError("cannot open output file " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"High-order multiscale solver for elliptic problems with "
               "rough coefficients"};
  app.require_subcommand(1);

  CommonFlags flags;
  CLI::App* solve = app.add_subcommand(
      "solve", "Single multiscale solve against the fine reference");
  CLI::App* h_sweep =
      app.add_subcommand("h-sweep", "Errors and EOC across coarse mesh sizes");
  CLI::App* ell_sweep = app.add_subcommand(
      "ell-sweep", "Errors and decay slope across localization radii");
  CLI::App* decay = app.add_subcommand(
      "decay", "Basis localization errors for a central element");
  CLI::App* gen_coeff = app.add_subcommand(
      "gen-coeff", "Generate and store a coefficient field");
  for (CLI::App* cmd : {solve, h_sweep, ell_sweep, decay, gen_coeff}) {
    add_common_flags(cmd, flags);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    holod::StudyResult result;
    if (gen_coeff->parsed()) {
      const holod::ModelSpec spec = model_spec_from_flags(flags);
      const holod::Coefficient coeff =
          holod::generate_coefficient(spec, flags.dim);
      if (flags.out.empty()) {
        throw holod::ConfigError("gen-coeff requires --out <path>");
      }
      holod::save_coefficient(flags.out, coeff);
      std::fprintf(stderr, "wrote %d values (alpha=%.6g, beta=%.6g) to %s\n",
                   static_cast<int>(coeff.values().size()), coeff.alpha(),
                   coeff.beta(), flags.out.c_str());
      return 0;
    }
    if (solve->parsed()) {
      result = holod::run_single(config_from_flags(flags, holod::StudyKind::Single));
    } else if (h_sweep->parsed()) {
      result = holod::run_h_sweep(config_from_flags(flags, holod::StudyKind::HSweep));
    } else if (ell_sweep->parsed()) {
      result = holod::run_ell_sweep(
          config_from_flags(flags, holod::StudyKind::EllSweep));
    } else {
      result =
          holod::run_decay_study(config_from_flags(flags, holod::StudyKind::Decay));
    }
    write_output(holod::serialize_csv(result), flags.out);
    if (holod::n_failed_rows(result) > 0) {
      std::fprintf(stderr, "%d of %d rows failed numerically\n",
                   holod::n_failed_rows(result),
                   static_cast<int>(result.rows.size()));
      return 3;
    }
    return 0;
  } catch (const holod::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const holod::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
