#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "elasteig/coefficients.hpp"
#include "elasteig/mesh.hpp"

namespace elasteig {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

enum class ElementFamily {
  TaylorHood,  // vector P2 displacement, continuous P1 pressure
  Mini         // vector P1 + cubic bubble displacement, continuous P1 pressure
};

std::string to_string(ElementFamily family);
ElementFamily element_family_from_string(const std::string& name);

/// Affine map of one cell and the gradients of its barycentric coordinates.
struct CellGeometry {
  Point origin = Point::Zero();
  Eigen::Matrix2d jacobian = Eigen::Matrix2d::Zero();  // columns v1-v0, v2-v0
  double area = 0.0;
  std::array<Point, 3> grad_bary{};

  static CellGeometry of(const Mesh& mesh, int cell);
  [[nodiscard]] Point map(const Eigen::Vector2d& ref) const {
    return origin + jacobian * ref;
  }
};

/// Scalar displacement shape functions of one cell evaluated at a point.
/// Node order: Taylor-Hood = 3 vertices then 3 edge midpoints (node 3+i on
/// the edge opposite vertex i); mini = 3 vertices then the bubble.
struct ShapeValues {
  int count = 0;
  std::array<double, 6> value{};
  std::array<Point, 6> grad{};
  std::array<Eigen::Matrix2d, 6> hessian{};
};

ShapeValues displacement_shapes(ElementFamily family, const CellGeometry& geo,
                                const Eigen::Vector2d& ref);

int nodes_per_cell(ElementFamily family);

/// Degrees of freedom. Displacement dof `2*node + component` lives on
/// scalar node `node`; pressure dof `v` lives on vertex `v`.
struct DofMap {
  ElementFamily family = ElementFamily::TaylorHood;
  int num_nodes = 0;
  int num_pressure = 0;
  std::vector<std::array<int, 6>> cell_nodes;
  std::vector<Point> anchors;
  std::vector<char> node_on_dirichlet;
  std::vector<int> dirichlet_dofs;  // sorted displacement dofs
  std::vector<int> free_index;      // displacement dof -> reduced index or -1
  std::vector<int> free_dofs;       // reduced index -> displacement dof

  [[nodiscard]] int num_displacement() const { return 2 * num_nodes; }
  [[nodiscard]] int num_free_displacement() const { return static_cast<int>(free_dofs.size()); }
  /// Size of the reduced saddle-point system.
  [[nodiscard]] int num_unknowns() const { return num_free_displacement() + num_pressure; }
};

/// Throws InputError when the mesh has no Dirichlet edge.
DofMap build_dof_map(const Mesh& mesh, const EdgeTopology& topo, ElementFamily family);

/// Same as build_dof_map but tolerates an empty Dirichlet boundary; used by
/// checks that need the unconstrained operators.
DofMap build_dof_map_unconstrained(const Mesh& mesh, const EdgeTopology& topo,
                                   ElementFamily family);

/// Sparse realizations of the four bilinear forms
///   a(u,v) = 2 (mu eps(u), eps(v)),  b(v,q) = -(q, div v),
///   c(p,q) = (p/lambda, q),          d(u,v) = rho (u, v).
/// `B` has one row per pressure dof.
struct FormMatrices {
  SparseMatrix A, B, C, M;
};

/// Matrices restricted to the free displacement dofs (homogeneous Dirichlet
/// conditions eliminated symmetrically); the pressure block is unchanged.
struct SystemMatrices : FormMatrices {
  int num_free_displacement = 0;
  int num_pressure = 0;
};

struct AssemblyOptions {
  int quad_degree = 6;
};

/// Assembles over all displacement dofs (no boundary conditions).
FormMatrices assemble_full(const Mesh& mesh, const DofMap& dofs, const MaterialModel& model,
                           const AssemblyOptions& opts = {});

SystemMatrices restrict_to_free(const FormMatrices& full, const DofMap& dofs);

SystemMatrices assemble(const Mesh& mesh, const DofMap& dofs, const MaterialModel& model,
                        const AssemblyOptions& opts = {});

using VectorField = std::function<Eigen::Vector2d(const Point&)>;
using ScalarField = std::function<double(const Point&)>;

/// Nodal interpolation over all displacement dofs; bubble coefficients are 0.
Vector interpolate_displacement(const DofMap& dofs, const VectorField& f);
Vector interpolate_pressure(const Mesh& mesh, const ScalarField& f);

/// Expands a reduced displacement vector to all dofs (zeros on Dirichlet).
Vector expand_displacement(const DofMap& dofs, const Vector& reduced);
Vector reduce_displacement(const DofMap& dofs, const Vector& full);

struct DisplacementSample {
  Eigen::Vector2d value = Eigen::Vector2d::Zero();
  Eigen::Matrix2d grad = Eigen::Matrix2d::Zero();  // grad(r, c) = d u_r / d x_c
};

DisplacementSample evaluate_displacement(const DofMap& dofs, const CellGeometry& geo, int cell,
                                         const Vector& u_full, const Eigen::Vector2d& ref);

/// Writes `m` in MatrixMarket coordinate format (general, real).
void write_matrix_market(std::ostream& out, const SparseMatrix& m);

} // namespace elasteig
