#include "elasteig/quadrature.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <span>

#include "elasteig/error.hpp"

namespace elasteig {

namespace {

#include "triangle_rules.inc"

QuadratureRule make_rule(std::span<const double[3]> table, int degree) {
  QuadratureRule r;
  r.degree = degree;
  for (const auto& row : table) {
    r.points.emplace_back(row[0], row[1]);
    r.weights.push_back(row[2]);
  }
  return r;
}

const std::array<QuadratureRule, 10>& all_rules() {
  static const std::array<QuadratureRule, 10> rules = {
      make_rule(kTriRule1, 1), make_rule(kTriRule2, 2), make_rule(kTriRule3, 3),
      make_rule(kTriRule4, 4), make_rule(kTriRule5, 5), make_rule(kTriRule6, 6),
      make_rule(kTriRule7, 7), make_rule(kTriRule8, 8), make_rule(kTriRule9, 9),
      make_rule(kTriRule10, 10)};
  return rules;
}

} // namespace

const QuadratureRule& quadrature_rule(int degree) {
  if (degree < 1 || degree > 10) {
    throw InputError("unsupported triangle quadrature degree " + std::to_string(degree) +
                     " (supported: 1..10)");
  }
  return all_rules()[degree - 1];
}

LineRule gauss_line_rule(int degree) {
  const int n = std::max(1, (degree + 2) / 2);
  LineRule r;
  r.points.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.points[i] = 0.5 * (1.0 - x);
    r.weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

} // namespace elasteig
