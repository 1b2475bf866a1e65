#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

#include "elasteig/error.hpp"
#include "elasteig/mesh.hpp"

using namespace elasteig;

namespace {

int count_kind(const Mesh& m, BoundaryKind k) {
  return static_cast<int>(std::count_if(m.boundary_edges.begin(), m.boundary_edges.end(),
                                        [&](const BoundaryEdge& e) { return e.kind == k; }));
}

} // namespace

TEST(Mesh, UnitSquareCounts) {
  const Mesh m = unit_square_mesh(5);
  EXPECT_EQ(m.num_vertices(), 36);
  EXPECT_EQ(m.num_cells(), 50);
  EXPECT_NEAR(m.total_area(), 1.0, 1e-15);
  EXPECT_EQ(count_kind(m, BoundaryKind::Dirichlet), 5);
  EXPECT_EQ(count_kind(m, BoundaryKind::Neumann), 15);
  EXPECT_EQ(conformity_defect(m), "");
  for (int c = 0; c < m.num_cells(); ++c) EXPECT_GT(m.signed_area(c), 0.0);
  EXPECT_NEAR(m.max_diameter(), std::sqrt(2.0) / 5, 1e-15);
}

TEST(Mesh, ThreeStripTags) {
  const Mesh m = three_strip_square_mesh(6);
  EXPECT_EQ(m.subdomains(), (std::set<int>{1, 2, 3}));
  for (int c = 0; c < m.num_cells(); ++c) {
    const double x = m.centroid(c).x();
    EXPECT_EQ(m.cell_subdomain[c], x < 1.0 / 3 ? 1 : x < 2.0 / 3 ? 2 : 3);
  }
  EXPECT_THROW(three_strip_square_mesh(4), InputError);
}

TEST(Mesh, LShapeGeometry) {
  const Mesh m = lshape_mesh(4);
  EXPECT_NEAR(m.total_area(), 3.0, 1e-14);
  EXPECT_EQ(conformity_defect(m), "");
  std::map<int, double> area;
  for (int c = 0; c < m.num_cells(); ++c) area[m.cell_subdomain[c]] += m.signed_area(c);
  for (int s : {1, 2, 3}) EXPECT_NEAR(area[s], 1.0, 1e-14);
  for (const auto& e : m.boundary_edges) {
    const bool neumann = e.label == kLBottom || e.label == kLRight;
    EXPECT_EQ(e.kind, neumann ? BoundaryKind::Neumann : BoundaryKind::Dirichlet);
  }
}

TEST(Mesh, EdgeTopologyEuler) {
  const Mesh m = lshape_mesh(3);
  const EdgeTopology t = build_edge_topology(m);
  // V - E + F = 1 for a simply connected domain
  EXPECT_EQ(m.num_vertices() - t.num_edges() + m.num_cells(), 1);
  for (const auto& e : t.edges) {
    EXPECT_NEAR(e.normal.norm(), 1.0, 1e-15);
    const Point d = m.vertices[e.vertices[1]] - m.vertices[e.vertices[0]];
    EXPECT_NEAR(e.normal.dot(d), 0.0, 1e-15);
    // outward from cells[0]
    const Point mid = 0.5 * (m.vertices[e.vertices[0]] + m.vertices[e.vertices[1]]);
    EXPECT_GT(e.normal.dot(mid - m.centroid(e.cells[0])), 0.0);
    EXPECT_EQ(e.cells[1] < 0, e.kind != EdgeClass::Interior);
  }
}

TEST(Mesh, ValidateRejectsClockwiseCell) {
  Mesh m = unit_square_mesh(2);
  std::swap(m.cells[0][1], m.cells[0][2]);
  EXPECT_THROW(validate(m), InputError);
}

TEST(Refinement, UniformGivesFourSimilarChildren) {
  const Mesh m = unit_square_mesh(3);
  const RefinementResult r = refine_uniform(m);
  EXPECT_EQ(r.mesh.num_cells(), 4 * m.num_cells());
  EXPECT_NEAR(r.mesh.total_area(), 1.0, 1e-15);
  EXPECT_NEAR(r.mesh.min_angle(), m.min_angle(), 1e-12);
  EXPECT_EQ(conformity_defect(r.mesh), "");
  for (int c = 0; c < m.num_cells(); ++c) {
    double a = 0.0;
    for (int k : r.children[c]) {
      a += r.mesh.signed_area(k);
      EXPECT_EQ(r.mesh.cell_subdomain[k], m.cell_subdomain[c]);
    }
    EXPECT_NEAR(a, m.signed_area(c), 1e-15);
  }
}

TEST(Refinement, RandomMarkingStaysConformingAndShapeRegular) {
  std::mt19937 rng(3);
  Mesh m = lshape_mesh(2);
  const double angle0 = m.min_angle();
  for (int round = 0; round < 8; ++round) {
    std::vector<int> marked;
    for (int c = 0; c < m.num_cells(); ++c) {
      if (rng() % 5 == 0) marked.push_back(c);
    }
    const RefinementResult r = refine(m, marked);
    for (int c : marked) EXPECT_GE(r.children[c].size(), 4u);
    m = r.mesh;
    ASSERT_EQ(conformity_defect(m), "");
    EXPECT_NEAR(m.total_area(), 3.0, 1e-13);
  }
  // newest-vertex bisection produces finitely many similarity classes
  EXPECT_GE(m.min_angle(), angle0 / 2 - 1e-12);
}

TEST(MeshIo, NativeRoundTrip) {
  const Mesh m = three_strip_square_mesh(3);
  std::stringstream s;
  write_native(s, m);
  Mesh back = read_native(s);
  EXPECT_EQ(back.vertices, m.vertices);
  EXPECT_EQ(back.cells, m.cells);
  EXPECT_EQ(back.cell_subdomain, m.cell_subdomain);
  EXPECT_EQ(back.boundary_edges.size(), m.boundary_edges.size());
}

TEST(MeshIo, Msh2Triangle) {
  std::istringstream in(R"($MeshFormat
2.2 0 8
$EndMeshFormat
$Nodes
4
1 0 0 0
2 1 0 0
3 1 1 0
4 0 1 0
$EndNodes
$Elements
6
1 1 2 7 1 1 2
2 1 2 8 2 2 3
3 1 2 8 3 3 4
4 1 2 8 4 4 1
5 2 2 1 1 1 2 3
6 2 2 1 1 1 3 4
$EndElements
)");
  const Mesh m = read_msh2(in, {7});
  EXPECT_EQ(m.num_cells(), 2);
  EXPECT_NEAR(m.total_area(), 1.0, 1e-15);
  EXPECT_EQ(count_kind(m, BoundaryKind::Dirichlet), 1);
}

TEST(MeshIo, MalformedNativeThrows) {
  std::istringstream in("3 1 3\n0 0\n1 0\n");
  EXPECT_THROW(read_native(in), InputError);
}
