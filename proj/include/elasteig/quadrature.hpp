#pragma once

#include <vector>

#include <Eigen/Core>

namespace elasteig {

/// Quadrature on the reference triangle (0,0), (1,0), (0,1).
struct QuadratureRule {
  std::vector<Eigen::Vector2d> points;  // reference coordinates (xi, eta)
  std::vector<double> weights;           // sum to 1/2
  int degree = 0;
};

/// Fully symmetric rule with positive weights, exact for polynomials of
/// total degree `degree` (1 <= degree <= 10). Throws InputError otherwise.
const QuadratureRule& quadrature_rule(int degree);

/// Gauss-Legendre rule on [0, 1] exact to `degree` (any degree >= 0).
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;  // sum to 1
};
LineRule gauss_line_rule(int degree);

} // namespace elasteig
