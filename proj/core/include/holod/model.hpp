#pragma once

#include <cstdint>
#include <string>

#include "holod/assembly.hpp"

namespace holod {

enum class CoefficientKind { RoughUniform, Constant, File };

/// Coefficient model: a seeded rough field (one i.i.d. uniform value per
/// eps-cell from a counter-based generator), a constant, or a file.
struct ModelSpec {
  CoefficientKind kind = CoefficientKind::RoughUniform;
  double lo = 0.25;      ///< value range for RoughUniform; Constant uses lo
  double hi = 2.5;
  int eps_cells = 32;    ///< eps-mesh cells per axis (1/eps)
  uint64_t seed = 1;
  std::string file;      ///< path for CoefficientKind::File
};

/// Deterministic, platform-independent: the value of each cell is keyed by
/// (seed, cell index), so identical specs give identical fields.
Coefficient generate_coefficient(const ModelSpec& spec, int dimension);

enum class RhsKind { F1, F2, Constant, Expression };

struct RhsSpec {
  RhsKind kind = RhsKind::F1;
  double value = 1.0;       ///< for RhsKind::Constant
  std::string expression;   ///< for RhsKind::Expression
};

/// f1(x) = sin(5 pi x1) cos(3 pi x2); f2(x) = (x1 + cos(3 pi x1)) x2^3.
/// In 1D the fields are evaluated at x2 = 0.
ScalarField make_rhs(const RhsSpec& spec);

/// Parses CLI-style right-hand side ids: f1 | f2 | const | expr=<string>.
RhsSpec parse_rhs_spec(const std::string& text);

}  // namespace holod
