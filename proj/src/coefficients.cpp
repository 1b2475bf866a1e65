#include "elasteig/coefficients.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "elasteig/error.hpp"
#include "elasteig/quadrature.hpp"

namespace elasteig {

double evaluate(const YoungField& field, const Point& p) {
  return std::visit(
      [&](const auto& f) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(f)>, double>) return f;
        else return f(p.x(), p.y());
      },
      field);
}

void MaterialModel::check() const {
  if (!(poisson >= 0.0 && poisson <= 0.5)) throw InputError("poisson ratio out of range [0, 0.5]");
  if (!(density > 0.0)) throw InputError("density must be positive");
  if (young.empty()) throw InputError("material has no Young's modulus");
}

double MaterialModel::young_at(const Point& p, int subdomain) const {
  auto it = young.find(subdomain);
  if (it == young.end()) {
    throw InputError("unknown subdomain tag " + std::to_string(subdomain));
  }
  const double e = evaluate(it->second, p);
  if (!(e > 0.0) || !std::isfinite(e)) {
    throw InputError("Young's modulus must be positive and finite (subdomain " +
                     std::to_string(subdomain) + ")");
  }
  return e;
}

MaterialModel MaterialModel::scaled(double factor) const {
  MaterialModel out = *this;
  for (auto& [tag, field] : out.young) {
    if (auto* c = std::get_if<double>(&field)) {
      *c *= factor;
    } else {
      const auto& e = std::get<Expression>(field);
      std::ostringstream s;
      s.precision(17);
      s << factor << "*(" << e.source() << ")";
      field = Expression(s.str());
    }
  }
  return out;
}

LameParameters lame_from_young(double young, double nu) {
  if (!(nu >= 0.0 && nu <= 0.5)) throw InputError("poisson ratio out of range [0, 0.5]");
  if (!(young > 0.0)) throw InputError("Young's modulus must be positive");
  LameParameters l;
  l.mu = young / 2.0;
  if (nu == 0.5) {
    l.lambda = std::numeric_limits<double>::infinity();
    l.lambda_inv = 0.0;
  } else {
    l.lambda = young * nu / (1.0 - 2.0 * nu);
    l.lambda_inv = nu == 0.0 ? std::numeric_limits<double>::infinity()
                             : (1.0 - 2.0 * nu) / (young * nu);
  }
  return l;
}

double evaluate_mu(const MaterialModel& model, const Point& p, int subdomain) {
  return model.young_at(p, subdomain) / 2.0;
}

double evaluate_lambda_inv(const MaterialModel& model, const Point& p, int subdomain) {
  const double e = model.young_at(p, subdomain);
  if (model.stokes_limit()) return 0.0;
  return (1.0 - 2.0 * model.poisson) / (e * model.poisson);
}

ProjectedCoefficients project_coefficients(const MaterialModel& model, const Mesh& mesh,
                                           int quad_degree) {
  if (quad_degree < 2) throw InputError("projection quadrature degree must be >= 2");
  const auto& rule = quadrature_rule(quad_degree);
  ProjectedCoefficients out;
  out.mu_h.resize(mesh.cells.size());
  out.lambda_inv.resize(mesh.cells.size());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& v = mesh.cells[c];
    const Point& p0 = mesh.vertices[v[0]];
    const Point e1 = mesh.vertices[v[1]] - p0;
    const Point e2 = mesh.vertices[v[2]] - p0;
    const int sub = mesh.cell_subdomain[c];
    double mu = 0.0, linv = 0.0;
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const Point x = p0 + rule.points[q].x() * e1 + rule.points[q].y() * e2;
      const double w = 2.0 * rule.weights[q];  // reference area 1/2
      mu += w * evaluate_mu(model, x, sub);
      if (!model.stokes_limit()) linv += w * evaluate_lambda_inv(model, x, sub);
    }
    out.mu_h[c] = mu;
    out.lambda_inv[c] = linv;
  }
  return out;
}

void check_compatible(const MaterialModel& model, const Mesh& mesh) {
  model.check();
  if (model.poisson == 0.0) {
    throw InputError("poisson ratio 0 gives lambda = 0; the pressure formulation needs nu > 0");
  }
  for (int s : mesh.subdomains()) {
    if (!model.young.contains(s)) {
      throw InputError("material has no Young's modulus for subdomain " + std::to_string(s));
    }
  }
  if (model.stokes_limit()) {
    bool neumann = false;
    for (const auto& e : mesh.boundary_edges) neumann = neumann || e.kind == BoundaryKind::Neumann;
    if (!neumann) {
      throw InputError(
          "pressure nonuniqueness: with nu = 0.5 and no Neumann boundary the pressure is only "
          "determined up to a constant");
    }
  }
}

} // namespace elasteig
