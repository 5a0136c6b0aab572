#include "holod/model.hpp"

#include <cmath>

#include "holod/expr.hpp"

namespace holod {

namespace {

uint64_t splitmix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Uniform double in [0,1) from the top 53 bits; exact in IEEE arithmetic.
double to_unit_interval(uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace

Coefficient generate_coefficient(const ModelSpec& spec, int dimension) {
  switch (spec.kind) {
    case CoefficientKind::Constant: {
      if (!(spec.lo > 0.0)) {
        throw NonPositiveCoefficient("constant coefficient must be positive");
      }
      return Coefficient::constant(dimension, spec.lo);
    }
    case CoefficientKind::File:
      return load_coefficient(spec.file);
    case CoefficientKind::RoughUniform:
      break;
  }
  if (!(spec.lo > 0.0) || !(spec.hi >= spec.lo)) {
    throw ConfigError("generate_coefficient: need 0 < lo <= hi, got [" +
                      std::to_string(spec.lo) + "," + std::to_string(spec.hi) +
                      "]");
  }
  TensorMesh mesh(dimension, spec.eps_cells);
  Eigen::VectorXd values(mesh.n_elements());
  const uint64_t stream = splitmix64(spec.seed);
  for (int cell = 0; cell < mesh.n_elements(); ++cell) {
    const uint64_t bits = splitmix64(stream ^ static_cast<uint64_t>(cell));
    values[cell] = spec.lo + (spec.hi - spec.lo) * to_unit_interval(bits);
  }
  return Coefficient(mesh, std::move(values));
}

ScalarField make_rhs(const RhsSpec& spec) {
  switch (spec.kind) {
    case RhsKind::F1:
      return [](double x1, double x2) {
        return std::sin(5.0 * M_PI * x1) * std::cos(3.0 * M_PI * x2);
      };
    case RhsKind::F2:
      return [](double x1, double x2) {
        return (x1 + std::cos(3.0 * M_PI * x1)) * x2 * x2 * x2;
      };
    case RhsKind::Constant: {
      const double v = spec.value;
      return [v](double, double) { return v; };
    }
    case RhsKind::Expression: {
      Expression expr = Expression::parse(spec.expression);
      return [expr](double x1, double x2) { return expr(x1, x2); };
    }
  }
  throw ConfigError("make_rhs: unknown kind");
}

RhsSpec parse_rhs_spec(const std::string& text) {
  RhsSpec spec;
  if (text == "f1") {
    spec.kind = RhsKind::F1;
  } else if (text == "f2") {
    spec.kind = RhsKind::F2;
  } else if (text == "const") {
    spec.kind = RhsKind::Constant;
  } else if (text.rfind("expr=", 0) == 0) {
    spec.kind = RhsKind::Expression;
    spec.expression = text.substr(5);
    Expression::parse(spec.expression);  // validate now
  } else {
    throw ConfigError("unknown right-hand side '" + text +
                      "' (expected f1 | f2 | const | expr=<string>)");
  }
  return spec;
}

}  // namespace holod
