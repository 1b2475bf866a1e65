#include <gtest/gtest.h>

#include <cmath>

#include "elasteig/error.hpp"
#include "elasteig/expression.hpp"
#include "elasteig/quadrature.hpp"

using namespace elasteig;

namespace {

// Integral of x^a y^b over the reference triangle: a! b! / (a + b + 2)!.
double monomial_integral(int a, int b) {
  return std::tgamma(a + 1.0) * std::tgamma(b + 1.0) / std::tgamma(a + b + 3.0);
}

} // namespace

TEST(Quadrature, ExactForMonomialsUpToDegree) {
  for (int d = 1; d <= 10; ++d) {
    const QuadratureRule& q = quadrature_rule(d);
    EXPECT_GE(q.degree, d);
    for (double w : q.weights) EXPECT_GT(w, 0.0);
    for (const auto& p : q.points) {
      EXPECT_GE(p.x(), 0.0);
      EXPECT_GE(p.y(), 0.0);
      EXPECT_LE(p.x() + p.y(), 1.0 + 1e-15);
    }
    for (int a = 0; a <= d; ++a) {
      for (int b = 0; a + b <= d; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < q.points.size(); ++i) {
          s += q.weights[i] * std::pow(q.points[i].x(), a) * std::pow(q.points[i].y(), b);
        }
        EXPECT_NEAR(s, monomial_integral(a, b), 1e-14) << "degree " << d << " x^" << a << " y^" << b;
      }
    }
  }
}

TEST(Quadrature, RejectsUnsupportedDegree) {
  EXPECT_THROW(quadrature_rule(0), InputError);
  EXPECT_THROW(quadrature_rule(11), InputError);
}

TEST(Quadrature, GaussLineRule) {
  for (int d = 0; d <= 15; ++d) {
    const LineRule r = gauss_line_rule(d);
    for (int k = 0; k <= d; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < r.points.size(); ++i) s += r.weights[i] * std::pow(r.points[i], k);
      EXPECT_NEAR(s, 1.0 / (k + 1), 1e-14);
    }
  }
}

TEST(Expression, Arithmetic) {
  EXPECT_DOUBLE_EQ(Expression("1 + 2*3")(0, 0), 7.0);
  EXPECT_DOUBLE_EQ(Expression("-x^2")(3, 0), -9.0);
  EXPECT_DOUBLE_EQ(Expression("2^3^2")(0, 0), 512.0);
  EXPECT_DOUBLE_EQ(Expression("(x - y) / 4")(5, 1), 1.0);
  EXPECT_DOUBLE_EQ(Expression("sqrt(x^2 + y^2 + 4)")(1.5, -0.5), std::sqrt(1.5 * 1.5 + 0.25 + 4));
  EXPECT_DOUBLE_EQ(Expression("1.5e2")(0, 0), 150.0);
  const double x = 0.3;
  EXPECT_EQ(Expression("x^2")(x, 0), x * x);
}

TEST(Expression, SyntaxErrors) {
  for (const char* bad : {"", "1 +", "x y", "sqrt(2", "z", "2 ** 3", "(1))"}) {
    EXPECT_THROW(Expression{bad}, InputError) << bad;
  }
}
