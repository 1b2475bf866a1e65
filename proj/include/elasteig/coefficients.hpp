#pragma once

#include <map>
#include <variant>
#include <vector>

#include "elasteig/expression.hpp"
#include "elasteig/mesh.hpp"

namespace elasteig {

/// Young's modulus on one subdomain: a constant or a closed-form E(x, y).
using YoungField = std::variant<double, Expression>;

double evaluate(const YoungField& field, const Point& p);

/// Material data of the scaled eigenproblem: mu = E/2, lambda = E nu/(1-2nu).
struct MaterialModel {
  std::map<int, YoungField> young;
  double poisson = 0.35;
  double density = 1.0;

  /// True iff nu == 0.5 exactly; then 1/lambda vanishes identically.
  [[nodiscard]] bool stokes_limit() const { return poisson == 0.5; }

  /// Throws InputError when nu is outside [0, 0.5] or density <= 0.
  void check() const;

  [[nodiscard]] double young_at(const Point& p, int subdomain) const;

  /// Returns a copy with every Young's modulus multiplied by `factor`.
  [[nodiscard]] MaterialModel scaled(double factor) const;
};

struct LameParameters {
  double mu = 0.0;
  double lambda = 0.0;  // +infinity in the Stokes limit
  double lambda_inv = 0.0;
};

LameParameters lame_from_young(double young, double nu);

double evaluate_mu(const MaterialModel& model, const Point& p, int subdomain);

/// 1/lambda(x); zero in the Stokes limit. Requires nu > 0.
double evaluate_lambda_inv(const MaterialModel& model, const Point& p, int subdomain);

/// Per-cell means of mu and 1/lambda.
struct ProjectedCoefficients {
  std::vector<double> mu_h;
  std::vector<double> lambda_inv;
};

ProjectedCoefficients project_coefficients(const MaterialModel& model, const Mesh& mesh,
                                           int quad_degree = 6);

/// Rejects meshes whose subdomains are not all covered by the model,
/// (for nu == 0) formulations with an infinite 1/lambda and (for nu == 0.5)
/// boundaries without a Neumann part, where the pressure is not unique.
void check_compatible(const MaterialModel& model, const Mesh& mesh);

} // namespace elasteig
