#pragma once

#include <Eigen/Dense>

#include "holod/errors.hpp"

namespace holod {

/// Gauss-Legendre rule on [0,1]. Exact for polynomials of degree
/// <= 2*order - 1; weights sum to 1.
struct GaussRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  int order = 0;
};

GaussRule gauss_rule(int order);

}  // namespace holod
