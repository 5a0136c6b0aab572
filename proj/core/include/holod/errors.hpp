#pragma once

#include <stdexcept>
#include <string>

namespace holod {

/// Invalid configuration or input data. The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical breakdown (factorization or rank failure). CLI exit code 3.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A matrix expected to be SPD has a non-positive pivot. Usually signals
/// wrong boundary handling or an indefinite assembly bug.
struct NotPositiveDefinite : NumericalError {
  using NumericalError::NumericalError;
};

/// The constraint block of a KKT system does not have full row rank.
/// For corrector problems this signals a violated discrete inf-sup
/// condition (fine mesh too coarse relative to H/p^2).
struct RankDeficientConstraints : NumericalError {
  using NumericalError::NumericalError;
};

/// The Galerkin system in the corrector basis is singular (duplicated or
/// degenerate basis vectors).
struct SingularCoarseSystem : NumericalError {
  using NumericalError::NumericalError;
};

struct NonNestedMeshes : ConfigError {
  using ConfigError::ConfigError;
};

struct NonPositiveCoefficient : ConfigError {
  using ConfigError::ConfigError;
};

struct EmptyPatch : ConfigError {
  using ConfigError::ConfigError;
};

struct DimensionMismatch : ConfigError {
  using ConfigError::ConfigError;
};

}  // namespace holod
