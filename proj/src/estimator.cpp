#include "elasteig/estimator.hpp"

#include <cmath>
#include <ostream>

#include <Eigen/LU>

#include "elasteig/error.hpp"
#include "elasteig/quadrature.hpp"

namespace elasteig {

namespace {

constexpr int kResidualDegree = 6;
constexpr int kOscillationDegree = 8;
constexpr int kEdgeDegree = 6;

struct LocalFields {
  Eigen::Vector2d u = Eigen::Vector2d::Zero();
  Eigen::Matrix2d grad = Eigen::Matrix2d::Zero();  // grad(r, c) = d u_r / d x_c
  Eigen::Vector2d div_eps = Eigen::Vector2d::Zero();
  double p = 0.0;
  Eigen::Vector2d grad_p = Eigen::Vector2d::Zero();
};

LocalFields sample(const EstimatorContext& ctx, const CellGeometry& geo, int cell,
                   const DiscretePair& pair, const Eigen::Vector2d& ref) {
  const ShapeValues s = displacement_shapes(ctx.dofs.family, geo, ref);
  LocalFields f;
  Eigen::Vector2d lap = Eigen::Vector2d::Zero();
  Eigen::Vector2d grad_div = Eigen::Vector2d::Zero();
  for (int i = 0; i < s.count; ++i) {
    const int node = ctx.dofs.cell_nodes[cell][i];
    for (int r = 0; r < 2; ++r) {
      const double coef = pair.u[2 * node + r];
      f.u[r] += coef * s.value[i];
      f.grad.row(r) += coef * s.grad[i].transpose();
      lap[r] += coef * s.hessian[i].trace();
      grad_div += coef * s.hessian[i].col(r);
    }
  }
  // (div eps(u))_r = (lap u_r + d_r div u) / 2
  f.div_eps = 0.5 * (lap + grad_div);
  const std::array<double, 3> L = {1.0 - ref.x() - ref.y(), ref.x(), ref.y()};
  const auto& verts = ctx.mesh.cells[cell];
  for (int i = 0; i < 3; ++i) {
    f.p += pair.p[verts[i]] * L[i];
    f.grad_p += pair.p[verts[i]] * geo.grad_bary[i];
  }
  return f;
}

Eigen::Matrix2d strain(const Eigen::Matrix2d& grad) { return 0.5 * (grad + grad.transpose()); }

Eigen::Vector2d reference_coords(const CellGeometry& geo, const Point& x) {
  return geo.jacobian.inverse() * (x - geo.origin);
}

} // namespace

EstimatorWeights EstimatorWeights::from(const EdgeTopology& topo,
                                        const ProjectedCoefficients& proj) {
  EstimatorWeights w;
  const std::size_t nc = proj.mu_h.size();
  w.rho1.resize(nc);
  w.rho2.resize(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    const double two_mu = 2.0 * proj.mu_h[c];
    w.rho1[c] = 1.0 / std::sqrt(two_mu);
    w.rho2[c] = 1.0 / (1.0 / two_mu + proj.lambda_inv[c]);
  }
  w.rhoE.resize(topo.edges.size());
  for (std::size_t e = 0; e < topo.edges.size(); ++e) {
    const auto& cells = topo.edges[e].cells;
    const double mu_e = cells[1] < 0 ? proj.mu_h[cells[0]]
                                     : 0.5 * (proj.mu_h[cells[0]] + proj.mu_h[cells[1]]);
    w.rhoE[e] = 1.0 / std::sqrt(2.0 * mu_e) / std::sqrt(2.0);
  }
  return w;
}

EstimatorContext::EstimatorContext(const Mesh& m, const EdgeTopology& t, const DofMap& d,
                                   const MaterialModel& mm, const ProjectedCoefficients& p)
    : mesh(m), topo(t), dofs(d), model(mm), proj(p), weights(EstimatorWeights::from(t, p)) {
  if (static_cast<int>(p.mu_h.size()) != m.num_cells() ||
      static_cast<int>(d.cell_nodes.size()) != m.num_cells() ||
      static_cast<int>(t.cell_edges.size()) != m.num_cells()) {
    throw InputError("estimator: mesh, dof map and coefficients disagree in size");
  }
}

static void check_pair(const EstimatorContext& ctx, const DiscretePair& pair) {
  if (pair.u.size() != ctx.dofs.num_displacement() || pair.p.size() != ctx.mesh.num_vertices()) {
    throw InputError("estimator: eigenpair does not match the mesh");
  }
}

double element_residual_1(const EstimatorContext& ctx, int cell, const DiscretePair& pair) {
  check_pair(ctx, pair);
  const CellGeometry geo = CellGeometry::of(ctx.mesh, cell);
  const auto& q = quadrature_rule(kResidualDegree);
  const double two_mu = 2.0 * ctx.proj.mu_h[cell];
  const double rho_kappa = ctx.model.density * pair.kappa;
  double sum = 0.0;
  for (std::size_t k = 0; k < q.points.size(); ++k) {
    const LocalFields f = sample(ctx, geo, cell, pair, q.points[k]);
    const Eigen::Vector2d r1 = two_mu * f.div_eps - f.grad_p + rho_kappa * f.u;
    sum += q.weights[k] * r1.squaredNorm();
  }
  const double h = ctx.mesh.diameter(cell);
  const double rho1 = ctx.weights.rho1[cell];
  return h * h * rho1 * rho1 * 2.0 * geo.area * sum;
}

double element_residual_2(const EstimatorContext& ctx, int cell, const DiscretePair& pair) {
  check_pair(ctx, pair);
  const CellGeometry geo = CellGeometry::of(ctx.mesh, cell);
  const auto& q = quadrature_rule(kResidualDegree);
  const int sub = ctx.mesh.cell_subdomain[cell];
  double sum = 0.0;
  for (std::size_t k = 0; k < q.points.size(); ++k) {
    const LocalFields f = sample(ctx, geo, cell, pair, q.points[k]);
    const double lambda_inv = evaluate_lambda_inv(ctx.model, geo.map(q.points[k]), sub);
    const double r2 = f.grad.trace() + lambda_inv * f.p;
    sum += q.weights[k] * r2 * r2;
  }
  return ctx.weights.rho2[cell] * 2.0 * geo.area * sum;
}

double edge_jump(const EstimatorContext& ctx, int edge, const DiscretePair& pair) {
  check_pair(ctx, pair);
  const auto& e = ctx.topo.edges[edge];
  if (e.kind == EdgeClass::Dirichlet) return 0.0;
  if (e.kind != EdgeClass::Interior && e.kind != EdgeClass::Neumann) {
    throw InputError("estimator: unknown edge classification");
  }
  const Point& a = ctx.mesh.vertices[e.vertices[0]];
  const Point& b = ctx.mesh.vertices[e.vertices[1]];
  const int sides = e.kind == EdgeClass::Interior ? 2 : 1;
  std::array<CellGeometry, 2> geo;
  for (int s = 0; s < sides; ++s) geo[s] = CellGeometry::of(ctx.mesh, e.cells[s]);

  const LineRule line = gauss_line_rule(kEdgeDegree);
  double sum = 0.0;
  for (std::size_t k = 0; k < line.points.size(); ++k) {
    const Point x = a + line.points[k] * (b - a);
    std::array<Eigen::Vector2d, 2> traction;
    for (int s = 0; s < sides; ++s) {
      const int c = e.cells[s];
      const LocalFields f = sample(ctx, geo[s], c, pair, reference_coords(geo[s], x));
      const Eigen::Matrix2d sigma =
          2.0 * ctx.proj.mu_h[c] * strain(f.grad) - f.p * Eigen::Matrix2d::Identity();
      traction[s] = sigma * e.normal;
    }
    const Eigen::Vector2d jump =
        sides == 2 ? Eigen::Vector2d(0.5 * (traction[0] - traction[1])) : traction[0];
    sum += line.weights[k] * jump.squaredNorm();
  }
  const double rhoE = ctx.weights.rhoE[edge];
  return e.length * rhoE * rhoE * e.length * sum;
}

double oscillation(const EstimatorContext& ctx, int cell, const DiscretePair& pair) {
  check_pair(ctx, pair);
  const CellGeometry geo = CellGeometry::of(ctx.mesh, cell);
  const auto& q = quadrature_rule(kOscillationDegree);
  const int sub = ctx.mesh.cell_subdomain[cell];
  const double mu_h = ctx.proj.mu_h[cell];
  double sum = 0.0;
  for (std::size_t k = 0; k < q.points.size(); ++k) {
    const double dmu = evaluate_mu(ctx.model, geo.map(q.points[k]), sub) - mu_h;
    if (dmu == 0.0) continue;
    const DisplacementSample s = evaluate_displacement(ctx.dofs, geo, cell, pair.u, q.points[k]);
    sum += q.weights[k] * dmu * dmu * strain(s.grad).squaredNorm();
  }
  const double rho1 = ctx.weights.rho1[cell];
  return rho1 * rho1 * 2.0 * geo.area * sum;
}

ErrorIndicators assemble_indicators(const EstimatorContext& ctx, const DiscretePair& pair) {
  check_pair(ctx, pair);
  const int nc = ctx.mesh.num_cells();
  ErrorIndicators ind;
  ind.eta_K_sq.assign(nc, 0.0);
  ind.eta_J_sq.assign(nc, 0.0);
  ind.theta_sq.assign(nc, 0.0);
  std::vector<double> edge_terms(ctx.topo.edges.size());
  for (int e = 0; e < ctx.topo.num_edges(); ++e) edge_terms[e] = edge_jump(ctx, e, pair);
  double eta_sq = 0.0;
  double theta_sq = 0.0;
  for (int c = 0; c < nc; ++c) {
    ind.eta_K_sq[c] = element_residual_1(ctx, c, pair) + element_residual_2(ctx, c, pair);
    for (int i = 0; i < 3; ++i) ind.eta_J_sq[c] += edge_terms[ctx.topo.cell_edges[c][i]];
    ind.theta_sq[c] = oscillation(ctx, c, pair);
    eta_sq += ind.eta_K_sq[c] + ind.eta_J_sq[c];
    theta_sq += ind.theta_sq[c];
  }
  ind.eta = std::sqrt(eta_sq);
  ind.theta = std::sqrt(theta_sq);
  return ind;
}

double weighted_triple_norm(const Mesh& mesh, const DofMap& dofs, const MaterialModel& model,
                            const Vector& v, const Vector& q) {
  if (v.size() != dofs.num_displacement() || q.size() != mesh.num_vertices()) {
    throw InputError("weighted norm: coefficient vectors do not match the mesh");
  }
  const auto& rule = quadrature_rule(kOscillationDegree);
  double sum = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry geo = CellGeometry::of(mesh, c);
    const int sub = mesh.cell_subdomain[c];
    double local = 0.0;
    for (std::size_t k = 0; k < rule.points.size(); ++k) {
      const Eigen::Vector2d& ref = rule.points[k];
      const Point x = geo.map(ref);
      const double mu = evaluate_mu(model, x, sub);
      const double lambda_inv = evaluate_lambda_inv(model, x, sub);
      const DisplacementSample s = evaluate_displacement(dofs, geo, c, v, ref);
      const std::array<double, 3> L = {1.0 - ref.x() - ref.y(), ref.x(), ref.y()};
      double qv = 0.0;
      for (int i = 0; i < 3; ++i) qv += q[mesh.cells[c][i]] * L[i];
      local += rule.weights[k] *
               (mu * s.grad.squaredNorm() + qv * qv / mu + lambda_inv * qv * qv);
    }
    sum += 2.0 * geo.area * local;
  }
  return std::sqrt(sum);
}

double effectivity(double err_kappa, double eta) {
  if (!(eta > 0.0)) throw InputError("effectivity: estimator is zero");
  return err_kappa / (eta * eta);
}

void write_indicator_csv(std::ostream& out, const ErrorIndicators& ind) {
  out << "cell_id,eta_K_sq,eta_J_sq,theta_sq\n";
  out.precision(17);
  for (int c = 0; c < ind.size(); ++c) {
    out << c << ',' << ind.eta_K_sq[c] << ',' << ind.eta_J_sq[c] << ',' << ind.theta_sq[c]
        << '\n';
  }
}

} // namespace elasteig
