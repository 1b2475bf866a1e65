#pragma once

#include <iosfwd>
#include <vector>

#include "elasteig/coefficients.hpp"
#include "elasteig/fem.hpp"
#include "elasteig/mesh.hpp"

namespace elasteig {

/// Weights of the residual estimator built from the projected coefficients.
struct EstimatorWeights {
  std::vector<double> rho1;  // per cell, (2 mu_h)^{-1/2}
  std::vector<double> rho2;  // per cell, [(2 mu_h)^{-1} + 1/lambda]^{-1}
  std::vector<double> rhoE;  // per edge, (2 mu_E)^{-1/2} / sqrt(2), mu_E = mean of neighbours

  static EstimatorWeights from(const EdgeTopology& topo, const ProjectedCoefficients& proj);
};

/// One discrete eigenpair expressed on all displacement dofs.
struct DiscretePair {
  double kappa = 0.0;  // scaled eigenvalue entering the strong residual
  Vector u;            // all displacement dofs (Dirichlet entries zero)
  Vector p;            // vertex pressures
};

/// Everything the residual terms need about one discretization.
struct EstimatorContext {
  const Mesh& mesh;
  const EdgeTopology& topo;
  const DofMap& dofs;
  const MaterialModel& model;
  const ProjectedCoefficients& proj;
  EstimatorWeights weights;

  EstimatorContext(const Mesh& m, const EdgeTopology& t, const DofMap& d,
                   const MaterialModel& mm, const ProjectedCoefficients& p);
};

/// h_K^2 || rho1 R1 ||^2 with R1 = div(2 mu_h eps(u)) - grad p + rho kappa u.
double element_residual_1(const EstimatorContext& ctx, int cell, const DiscretePair& pair);

/// || rho2^{1/2} R2 ||^2 with R2 = div u + p / lambda.
double element_residual_2(const EstimatorContext& ctx, int cell, const DiscretePair& pair);

/// h_E || rhoE J ||^2 on one edge. J is half the traction jump on interior
/// edges, the full traction on Neumann edges and zero on Dirichlet edges.
double edge_jump(const EstimatorContext& ctx, int edge, const DiscretePair& pair);

/// || rho1 (mu - mu_h) eps(u) ||^2 on one cell.
double oscillation(const EstimatorContext& ctx, int cell, const DiscretePair& pair);

struct ErrorIndicators {
  std::vector<double> eta_K_sq;
  std::vector<double> eta_J_sq;  // every edge of the cell contributes its full term
  std::vector<double> theta_sq;
  double eta = 0.0;
  double theta = 0.0;

  [[nodiscard]] int size() const { return static_cast<int>(eta_K_sq.size()); }
  /// eta_T^2 = eta_K^2 + eta_J^2 + theta^2 for cell `c`.
  [[nodiscard]] double marking_indicator_sq(int c) const {
    return eta_K_sq[c] + eta_J_sq[c] + theta_sq[c];
  }
};

ErrorIndicators assemble_indicators(const EstimatorContext& ctx, const DiscretePair& pair);

/// (|| mu^{1/2} grad v ||^2 + || mu^{-1/2} q ||^2 + || lambda^{-1/2} q ||^2)^{1/2}
/// with exact coefficients; `v` on all displacement dofs, `q` on vertices.
double weighted_triple_norm(const Mesh& mesh, const DofMap& dofs, const MaterialModel& model,
                            const Vector& v, const Vector& q);

/// err / eta^2. Throws InputError when eta is not positive.
double effectivity(double err_kappa, double eta);

/// CSV with columns cell_id, eta_K_sq, eta_J_sq, theta_sq.
void write_indicator_csv(std::ostream& out, const ErrorIndicators& ind);

} // namespace elasteig
