#include <gtest/gtest.h>

#include <cmath>

#include "elasteig/error.hpp"
#include "elasteig/fem.hpp"
#include "oracles.hpp"

using namespace elasteig;

namespace elasteig {
void PrintTo(ElementFamily family, std::ostream* os) { *os << to_string(family); }
} // namespace elasteig

namespace {

struct Discretization {
  Mesh mesh;
  EdgeTopology topo;
  DofMap dofs;
  FormMatrices f;
};

Discretization make(Mesh mesh, ElementFamily family, const MaterialModel& model) {
  Discretization d;
  d.mesh = std::move(mesh);
  d.topo = build_edge_topology(d.mesh);
  d.dofs = build_dof_map_unconstrained(d.mesh, d.topo, family);
  d.f = assemble_full(d.mesh, d.dofs, model);
  return d;
}

MaterialModel model_with(const std::string& young, double nu = 0.3, double rho = 1.0) {
  MaterialModel m;
  for (int tag : {1, 2, 3}) m.young[tag] = Expression(young);
  m.poisson = nu;
  m.density = rho;
  return m;
}

// Integral of g over the mesh by the test-side conical rule.
double integrate(const Mesh& m, const std::function<double(const Point&)>& g) {
  double s = 0.0;
  for (const auto& c : m.cells) s += oracle::integrate_triangle(m.vertices[c[0]], m.vertices[c[1]], m.vertices[c[2]], g);
  return s;
}

class FamilyTest : public ::testing::TestWithParam<ElementFamily> {};

} // namespace

TEST_P(FamilyTest, MassOfPolynomialFields) {
  const MaterialModel m = model_with("1", 0.3, 2.5);
  const Discretization d = make(lshape_mesh(3), GetParam(), m);
  const Vector u = interpolate_displacement(d.dofs, [](const Point& p) { return Eigen::Vector2d(p.x(), 1.0 - p.y()); });
  const double exact = 2.5 * integrate(d.mesh, [](const Point& p) { return p.x() * p.x() + (1 - p.y()) * (1 - p.y()); });
  EXPECT_NEAR(u.dot(d.f.M * u), exact, 1e-12 * exact);
}

TEST_P(FamilyTest, StiffnessWithVariableModulus) {
  const MaterialModel m = model_with("2 + x + y^2");
  const Discretization d = make(unit_square_mesh(4), GetParam(), m);
  // u = (y, 2x): eps = [[0, 1.5], [1.5, 0]], |eps|^2 = 4.5
  const Vector u = interpolate_displacement(d.dofs, [](const Point& p) { return Eigen::Vector2d(p.y(), 2 * p.x()); });
  const double exact = integrate(d.mesh, [](const Point& p) { return 2 * (2 + p.x() + p.y() * p.y()) / 2 * 4.5; });
  EXPECT_NEAR(u.dot(d.f.A * u), exact, 1e-12 * exact);
}

TEST_P(FamilyTest, DivergenceCoupling) {
  const MaterialModel m = model_with("1");
  const Discretization d = make(unit_square_mesh(3), GetParam(), m);
  // u = (x, x*y) is in both spaces only for Taylor-Hood; use linear u for mini.
  const bool th = GetParam() == ElementFamily::TaylorHood;
  const Vector u = interpolate_displacement(d.dofs, [&](const Point& p) {
    return th ? Eigen::Vector2d(p.x() * p.x(), p.x() * p.y()) : Eigen::Vector2d(p.x(), 3 * p.y());
  });
  const Vector q = interpolate_pressure(d.mesh, [](const Point& p) { return 1.0 + p.y(); });
  const double exact = -integrate(d.mesh, [&](const Point& p) {
    const double div = th ? 3 * p.x() : 4.0;
    return (1.0 + p.y()) * div;
  });
  EXPECT_NEAR(q.dot(d.f.B * u), exact, 1e-13);
}

TEST_P(FamilyTest, InverseLameMass) {
  const MaterialModel m = model_with("3 + x", 0.4);
  const Discretization d = make(unit_square_mesh(3), GetParam(), m);
  const Vector q = interpolate_pressure(d.mesh, [](const Point& p) { return p.x() - p.y(); });
  const double exact = integrate(d.mesh, [](const Point& p) {
    const double lambda = (3 + p.x()) * 0.4 / (1 - 0.8);
    return (p.x() - p.y()) * (p.x() - p.y()) / lambda;
  });
  EXPECT_NEAR(q.dot(d.f.C * q), exact, 1e-10 * exact);
}

TEST_P(FamilyTest, StokesLimitDropsPressureMass) {
  const Discretization d = make(unit_square_mesh(2), GetParam(), model_with("1", 0.5));
  EXPECT_EQ(d.f.C.norm(), 0.0);
}

TEST_P(FamilyTest, ShapeFunctionsPartitionUnityAndGradients) {
  const Mesh mesh = lshape_mesh(1);
  const CellGeometry geo = CellGeometry::of(mesh, 2);
  const Eigen::Vector2d ref(0.21, 0.37);
  const ShapeValues s = displacement_shapes(GetParam(), geo, ref);
  // mini bubble is not part of the partition of unity
  const int nodes = GetParam() == ElementFamily::Mini ? 3 : s.count;
  double partial = 0.0;
  for (int i = 0; i < nodes; ++i) partial += s.value[i];
  EXPECT_NEAR(partial, 1.0, 1e-14);
  const double eps = 1e-6;
  const Eigen::Matrix2d jinv = geo.jacobian.inverse();
  for (int i = 0; i < s.count; ++i) {
    Point fd;
    for (int k = 0; k < 2; ++k) {
      // d/dx_k through the inverse map
      const Eigen::Vector2d dref = jinv.col(k) * eps;
      const double up = displacement_shapes(GetParam(), geo, ref + dref).value[i];
      const double dn = displacement_shapes(GetParam(), geo, ref - dref).value[i];
      fd[k] = (up - dn) / (2 * eps);
    }
    EXPECT_NEAR((fd - s.grad[i]).norm(), 0.0, 1e-6 * (1 + s.grad[i].norm()));
  }
}

TEST_P(FamilyTest, DirichletRestriction) {
  const Mesh mesh = unit_square_mesh(3);
  const EdgeTopology topo = build_edge_topology(mesh);
  const DofMap dofs = build_dof_map(mesh, topo, GetParam());
  const SystemMatrices s = assemble(mesh, dofs, model_with("1"));
  EXPECT_EQ(s.A.rows(), dofs.num_free_displacement());
  EXPECT_EQ(s.B.rows(), mesh.num_vertices());
  EXPECT_EQ(s.B.cols(), dofs.num_free_displacement());
  for (int d : dofs.dirichlet_dofs) {
    EXPECT_LT(dofs.anchors[d / 2].y(), 1e-15);
    EXPECT_EQ(dofs.free_index[d], -1);
  }
  const Vector full = Vector::LinSpaced(dofs.num_displacement(), 1, 2);
  const Vector back = expand_displacement(dofs, reduce_displacement(dofs, full));
  for (int i = 0; i < full.size(); ++i) EXPECT_EQ(back[i], dofs.free_index[i] < 0 ? 0.0 : full[i]);
}

INSTANTIATE_TEST_SUITE_P(Elements, FamilyTest,
                         ::testing::Values(ElementFamily::TaylorHood, ElementFamily::Mini),
                         [](const auto& info) { return to_string(info.param); });

TEST(Fem, RequiresDirichletBoundary) {
  SideTags free{BoundaryKind::Neumann, BoundaryKind::Neumann, BoundaryKind::Neumann, BoundaryKind::Neumann};
  const Mesh mesh = unit_square_mesh(2, free);
  const EdgeTopology topo = build_edge_topology(mesh);
  EXPECT_THROW(build_dof_map(mesh, topo, ElementFamily::TaylorHood), InputError);
}

TEST(Fem, ElementNames) {
  EXPECT_EQ(element_family_from_string("mini"), ElementFamily::Mini);
  EXPECT_THROW(element_family_from_string("p1p0"), InputError);
}

TEST(Coefficients, Validation) {
  MaterialModel m = model_with("1", 0.6);
  try {
    m.check();
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("poisson ratio out of range"), std::string::npos);
  }
  m.poisson = 0.5;
  SideTags clamped{BoundaryKind::Dirichlet, BoundaryKind::Dirichlet, BoundaryKind::Dirichlet, BoundaryKind::Dirichlet};
  try {
    check_compatible(m, unit_square_mesh(2, clamped));
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("pressure nonuniqueness"), std::string::npos);
  }
  m.poisson = 0.0;
  EXPECT_THROW(check_compatible(m, unit_square_mesh(2)), InputError);
  MaterialModel missing;
  missing.young[1] = 1.0;
  EXPECT_THROW(check_compatible(missing, three_strip_square_mesh(3)), InputError);
}

TEST(Coefficients, ProjectionIsCellMean) {
  MaterialModel m = model_with("2 + x*y", 0.25);
  const Mesh mesh = unit_square_mesh(2);
  const ProjectedCoefficients p = project_coefficients(m, mesh);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& t = mesh.cells[c];
    const auto& v = mesh.vertices;
    const double area = mesh.signed_area(c);
    const double mean_mu = oracle::integrate_triangle(v[t[0]], v[t[1]], v[t[2]], [](const Point& x) { return (2 + x.x() * x.y()) / 2; }) / area;
    const double mean_li = oracle::integrate_triangle(v[t[0]], v[t[1]], v[t[2]], [](const Point& x) { return 0.5 / ((2 + x.x() * x.y()) * 0.25); }) / area;
    EXPECT_NEAR(p.mu_h[c], mean_mu, 1e-14);
    // 1/E is not polynomial; the degree-6 rule is accurate to about 1e-9 here
    EXPECT_NEAR(p.lambda_inv[c], mean_li, 1e-8 * mean_li);
  }
  const LameParameters l = lame_from_young(3.0, 0.25);
  EXPECT_DOUBLE_EQ(l.mu, 1.5);
  EXPECT_DOUBLE_EQ(l.lambda, 1.5);
}
