#include "holod/quadrature.hpp"

#include <cmath>
#include <string>

namespace holod {

GaussRule gauss_rule(int order) {
  if (order < 1) {
    throw ConfigError("gauss_rule: order must be >= 1, got " +
                      std::to_string(order));
  }
  const int n = order;
  GaussRule rule;
  rule.order = n;
  rule.nodes.resize(n);
  rule.weights.resize(n);

  // Roots of the Legendre polynomial P_n on [-1,1] by Newton iteration,
  // then mapped to [0,1].
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // P_n(x) and P_n'(x) via the three-term recurrence.
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = (n == 1) ? x : p1;
      const double pn_prev = (n == 1) ? 1.0 : p0;
      dp = n * (x * pn - pn_prev) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = 0.5 * (1.0 - x);  // the cos guess starts near +1
    rule.weights[i] = 0.5 * w;
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  if (n % 2 == 1) {
    // Middle node is exactly 1/2; recompute its weight from the others so
    // the weights sum to 1 without accumulated Newton error.
    const int mid = n / 2;
    rule.nodes[mid] = 0.5;
    double rest = 0.0;
    for (int i = 0; i < n; ++i) {
      if (i != mid) rest += rule.weights[i];
    }
    rule.weights[mid] = 1.0 - rest;
  }
  return rule;
}

}  // namespace holod
