#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace elasteig {

using Point = Eigen::Vector2d;

enum class BoundaryKind : std::uint8_t { Dirichlet, Neumann };

struct BoundaryEdge {
  int a = -1;
  int b = -1;
  BoundaryKind kind = BoundaryKind::Neumann;
  int label = 0;
};

/// Conforming triangulation of a polygonal domain.
///
/// Cells are counter-clockwise vertex triples. Local edge `i` of a cell joins
/// vertices `(i+1)%3` and `(i+2)%3`, i.e. it is opposite local vertex `i`.
/// `refinement_edge[c]` is the local index of the edge bisected next by
/// newest-vertex bisection.
struct Mesh {
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> cells;
  std::vector<BoundaryEdge> boundary_edges;
  std::vector<int> cell_subdomain;
  std::vector<std::uint8_t> refinement_edge;

  [[nodiscard]] int num_vertices() const { return static_cast<int>(vertices.size()); }
  [[nodiscard]] int num_cells() const { return static_cast<int>(cells.size()); }

  [[nodiscard]] double signed_area(int cell) const;
  [[nodiscard]] double diameter(int cell) const;
  [[nodiscard]] double total_area() const;
  [[nodiscard]] double max_diameter() const;
  [[nodiscard]] double min_angle() const;
  [[nodiscard]] Point centroid(int cell) const;
  [[nodiscard]] std::set<int> subdomains() const;

  friend bool operator==(const Mesh&, const Mesh&) = default;
};

enum class EdgeClass : std::uint8_t { Interior, Dirichlet, Neumann };

struct EdgeTopology {
  struct Edge {
    std::array<int, 2> vertices{};
    std::array<int, 2> cells{-1, -1};  // cells[1] == -1 on the boundary
    std::array<int, 2> local_index{-1, -1};
    Point normal = Point::Zero();  // unit, outward from cells[0]
    double length = 0.0;
    EdgeClass kind = EdgeClass::Interior;
    int label = 0;
  };
  std::vector<Edge> edges;
  std::vector<std::array<int, 3>> cell_edges;  // local edge i -> global edge

  [[nodiscard]] int num_edges() const { return static_cast<int>(edges.size()); }
};

/// Checks every structural invariant of `Mesh` and throws `InputError` with
/// a description of the first violation.
void validate(const Mesh& mesh);

/// Builds the unique-edge structure; throws if adjacency is inconsistent
/// (an edge shared by more than two cells, an unlisted boundary edge or a
/// listed boundary edge that is interior).
EdgeTopology build_edge_topology(const Mesh& mesh);

/// Returns an empty string when `mesh` is conforming, otherwise a
/// human-readable description of the first defect (hanging node, edge
/// multiplicity, boundary mismatch).
std::string conformity_defect(const Mesh& mesh);

/// Assigns the longest edge of every cell as its refinement edge.
void assign_longest_edge_refinement(Mesh& mesh);

struct SideTags {
  BoundaryKind bottom = BoundaryKind::Dirichlet;
  BoundaryKind right = BoundaryKind::Neumann;
  BoundaryKind top = BoundaryKind::Neumann;
  BoundaryKind left = BoundaryKind::Neumann;
};

/// Boundary labels used by the built-in square generator.
enum SquareSide : int { kBottom = 1, kRight = 2, kTop = 3, kLeft = 4 };

/// Structured criss-cross mesh of (0,1)^2 with `n` squares per side, each
/// split along its (0,0)-(1,1) diagonal. Cells receive subdomain tag 1.
Mesh unit_square_mesh(int n, const SideTags& tags = {});

/// Same mesh with cells tagged 1, 2, 3 in the vertical strips
/// (0,1/3), (1/3,2/3), (2/3,1). Requires `n` divisible by 3 so that the
/// strip interfaces are mesh lines.
Mesh three_strip_square_mesh(int n, const SideTags& tags = {});

/// Boundary labels used by the L-shape generator.
enum LShapeSide : int {
  kLBottom = 1,     // y = -1
  kLRight = 2,      // x = 1
  kLTop = 3,        // y = 1
  kLLeft = 4,       // x = -1
  kLNotchVert = 5,  // x = 0, -1 < y < 0
  kLNotchHoriz = 6  // y = 0, 0 < x < 1
};

/// Structured mesh of (-1,1)^2 \ [0,1)x(-1,0] with `n` squares per unit
/// length. Subdomains: 1 = (0,1)x(0,1), 2 = (-1,0)x(0,1), 3 = (-1,0)x(-1,0).
/// Boundary: Neumann on y=-1 and x=1, Dirichlet elsewhere unless
/// `dirichlet_labels` overrides the Dirichlet label set.
Mesh lshape_mesh(int n, const std::set<int>& dirichlet_labels = {kLTop, kLLeft, kLNotchVert,
                                                                 kLNotchHoriz});

/// Re-tags boundary edges: kind is Dirichlet iff the label is in the set.
void set_dirichlet_labels(Mesh& mesh, const std::set<int>& dirichlet_labels);

struct RefinementResult {
  Mesh mesh;
  std::vector<std::vector<int>> children;  // parent cell -> child cells
};

/// Newest-vertex bisection. Every marked cell is bisected twice (all three
/// of its edges are split); additional bisections close the mesh so the
/// result has no hanging nodes.
RefinementResult refine(const Mesh& mesh, const std::vector<int>& marked);

/// Refines every cell (each cell becomes four similar children).
RefinementResult refine_uniform(const Mesh& mesh);

enum class MeshFormat { Native, Msh2 };

/// Native format: header `nv nc nb`, then `x y` per vertex, `a b c subdomain`
/// per cell and `a b D|N label` per boundary edge. `#` starts a comment.
/// For MSH 2.2 ASCII, line elements carry boundary labels (first tag,
/// the physical group) and the kind is Dirichlet iff the label is listed in
/// `dirichlet_labels`; triangles carry the subdomain tag.
Mesh load_mesh(const std::filesystem::path& path, MeshFormat format,
               const std::set<int>& dirichlet_labels = {});
Mesh read_native(std::istream& in);
Mesh read_msh2(std::istream& in, const std::set<int>& dirichlet_labels);
void write_native(std::ostream& out, const Mesh& mesh);

} // namespace elasteig
