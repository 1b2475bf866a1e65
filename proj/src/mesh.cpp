#include "elasteig/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "elasteig/error.hpp"

namespace elasteig {

namespace {

std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (hi << 32) | lo;
}

std::array<int, 2> local_edge(const std::array<int, 3>& cell, int i) {
  return {cell[(i + 1) % 3], cell[(i + 2) % 3]};
}

double orient(const Point& a, const Point& b, const Point& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

std::string edge_str(int a, int b) {
  std::ostringstream s;
  s << "(" << a << ", " << b << ")";
  return s.str();
}

} // namespace

double Mesh::signed_area(int cell) const {
  const auto& c = cells[cell];
  return 0.5 * orient(vertices[c[0]], vertices[c[1]], vertices[c[2]]);
}

double Mesh::diameter(int cell) const {
  const auto& c = cells[cell];
  double d = 0.0;
  for (int i = 0; i < 3; ++i) {
    d = std::max(d, (vertices[c[(i + 1) % 3]] - vertices[c[(i + 2) % 3]]).norm());
  }
  return d;
}

double Mesh::total_area() const {
  double a = 0.0;
  for (int c = 0; c < num_cells(); ++c) a += signed_area(c);
  return a;
}

double Mesh::max_diameter() const {
  double h = 0.0;
  for (int c = 0; c < num_cells(); ++c) h = std::max(h, diameter(c));
  return h;
}

double Mesh::min_angle() const {
  double m = std::numbers::pi;
  for (const auto& c : cells) {
    for (int i = 0; i < 3; ++i) {
      const Point u = vertices[c[(i + 1) % 3]] - vertices[c[i]];
      const Point v = vertices[c[(i + 2) % 3]] - vertices[c[i]];
      const double cosang = u.dot(v) / (u.norm() * v.norm());
      m = std::min(m, std::acos(std::clamp(cosang, -1.0, 1.0)));
    }
  }
  return m;
}

Point Mesh::centroid(int cell) const {
  const auto& c = cells[cell];
  return (vertices[c[0]] + vertices[c[1]] + vertices[c[2]]) / 3.0;
}

std::set<int> Mesh::subdomains() const {
  return {cell_subdomain.begin(), cell_subdomain.end()};
}

EdgeTopology build_edge_topology(const Mesh& mesh) {
  EdgeTopology topo;
  topo.cell_edges.resize(mesh.cells.size());
  std::unordered_map<std::uint64_t, int> index;
  index.reserve(mesh.cells.size() * 2);

  for (int c = 0; c < mesh.num_cells(); ++c) {
    for (int i = 0; i < 3; ++i) {
      const auto [p, q] = local_edge(mesh.cells[c], i);
      const auto key = edge_key(p, q);
      auto it = index.find(key);
      if (it == index.end()) {
        EdgeTopology::Edge e;
        e.vertices = {p, q};
        e.cells = {c, -1};
        e.local_index = {i, -1};
        const Point d = mesh.vertices[q] - mesh.vertices[p];
        e.length = d.norm();
        e.normal = Point(d.y(), -d.x()) / e.length;
        index.emplace(key, topo.num_edges());
        topo.cell_edges[c][i] = topo.num_edges();
        topo.edges.push_back(e);
      } else {
        auto& e = topo.edges[it->second];
        if (e.cells[1] != -1) {
          throw InputError("inconsistent adjacency: edge " + edge_str(p, q) +
                           " shared by more than two cells");
        }
        e.cells[1] = c;
        e.local_index[1] = i;
        topo.cell_edges[c][i] = it->second;
      }
    }
  }

  std::vector<bool> listed(topo.edges.size(), false);
  for (const auto& be : mesh.boundary_edges) {
    auto it = index.find(edge_key(be.a, be.b));
    if (it == index.end()) {
      throw InputError("inconsistent adjacency: boundary edge " + edge_str(be.a, be.b) +
                       " is not an edge of any cell");
    }
    auto& e = topo.edges[it->second];
    if (e.cells[1] != -1) {
      throw InputError("inconsistent adjacency: boundary edge " + edge_str(be.a, be.b) +
                       " is shared by two cells");
    }
    if (listed[it->second]) {
      throw InputError("boundary edge " + edge_str(be.a, be.b) + " listed twice");
    }
    listed[it->second] = true;
    e.kind = be.kind == BoundaryKind::Dirichlet ? EdgeClass::Dirichlet : EdgeClass::Neumann;
    e.label = be.label;
  }
  for (std::size_t k = 0; k < topo.edges.size(); ++k) {
    const auto& e = topo.edges[k];
    if (e.cells[1] == -1 && !listed[k]) {
      throw InputError("untagged boundary edge " + edge_str(e.vertices[0], e.vertices[1]));
    }
  }
  return topo;
}

std::string conformity_defect(const Mesh& mesh) {
  EdgeTopology topo;
  try {
    topo = build_edge_topology(mesh);
  } catch (const InputError& e) {
    return e.what();
  }
  // A hanging node leaves an unlisted one-sided edge, which the topology
  // builder rejects; here we additionally look for vertices lying strictly
  // inside boundary edges (T-junctions along the boundary).
  std::vector<int> used(mesh.vertices.size(), 0);
  for (const auto& c : mesh.cells) {
    for (int v : c) used[v] = 1;
  }
  for (std::size_t v = 0; v < used.size(); ++v) {
    if (!used[v]) return "vertex " + std::to_string(v) + " belongs to no cell";
  }
  for (const auto& e : topo.edges) {
    if (e.cells[1] != -1) continue;
    const Point& a = mesh.vertices[e.vertices[0]];
    const Point& b = mesh.vertices[e.vertices[1]];
    for (const auto& f : topo.edges) {
      if (&f == &e || f.cells[1] != -1) continue;
      for (int w : f.vertices) {
        if (w == e.vertices[0] || w == e.vertices[1]) continue;
        const Point& p = mesh.vertices[w];
        const double t = (p - a).dot(b - a) / (b - a).squaredNorm();
        if (t > 1e-12 && t < 1 - 1e-12 &&
            std::abs(orient(a, b, p)) <= 1e-14 * (b - a).squaredNorm()) {
          return "hanging vertex " + std::to_string(w) + " on boundary edge " +
                 edge_str(e.vertices[0], e.vertices[1]);
        }
      }
    }
  }
  return {};
}

void validate(const Mesh& mesh) {
  const int nv = mesh.num_vertices();
  if (mesh.cells.empty()) throw InputError("mesh has no cells");
  if (mesh.cell_subdomain.size() != mesh.cells.size() ||
      mesh.refinement_edge.size() != mesh.cells.size()) {
    throw InputError("per-cell arrays do not match the cell count");
  }
  for (int c = 0; c < mesh.num_cells(); ++c) {
    for (int v : mesh.cells[c]) {
      if (v < 0 || v >= nv) throw InputError("cell " + std::to_string(c) + " has invalid vertex");
    }
    if (!(mesh.signed_area(c) > 0.0)) {
      throw InputError("cell " + std::to_string(c) + " has non-positive signed area");
    }
    if (mesh.refinement_edge[c] > 2) {
      throw InputError("cell " + std::to_string(c) + " has invalid refinement edge");
    }
  }
  if (auto defect = conformity_defect(mesh); !defect.empty()) throw InputError(defect);
  const bool has_dirichlet =
      std::any_of(mesh.boundary_edges.begin(), mesh.boundary_edges.end(),
                  [](const BoundaryEdge& e) { return e.kind == BoundaryKind::Dirichlet; });
  if (!has_dirichlet) throw InputError("mesh has no Dirichlet boundary edge");
}

void assign_longest_edge_refinement(Mesh& mesh) {
  mesh.refinement_edge.assign(mesh.cells.size(), 0);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    double best = -1.0;
    for (int i = 0; i < 3; ++i) {
      const auto [p, q] = local_edge(mesh.cells[c], i);
      // Strict comparison keeps the lowest local index on ties.
      const double len = (mesh.vertices[q] - mesh.vertices[p]).squaredNorm();
      if (len > best * (1 + 1e-12)) {
        best = len;
        mesh.refinement_edge[c] = static_cast<std::uint8_t>(i);
      }
    }
  }
}

namespace {

/// Structured criss-cross mesh on [x0,x0+nx*h] x [y0,y0+ny*h]. Cells for
/// which `keep(i, j)` is false are dropped. Boundary edges are found
/// topologically and labelled by `label_of(midpoint)`.
Mesh structured_mesh(int nx, int ny, double x0, double y0, double h,
                     const std::function<bool(int, int)>& keep,
                     const std::function<int(const Point&)>& subdomain_of,
                     const std::function<int(const Point&)>& label_of,
                     const std::function<BoundaryKind(int)>& kind_of) {
  Mesh m;
  std::vector<int> vid((nx + 1) * (ny + 1), -1);
  auto vertex = [&](int i, int j) {
    int& id = vid[j * (nx + 1) + i];
    if (id < 0) {
      id = m.num_vertices();
      m.vertices.emplace_back(x0 + h * i, y0 + h * j);
    }
    return id;
  };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (!keep(i, j)) continue;
      const int v00 = vertex(i, j);
      const int v10 = vertex(i + 1, j);
      const int v01 = vertex(i, j + 1);
      const int v11 = vertex(i + 1, j + 1);
      m.cells.push_back({v00, v10, v11});
      m.cells.push_back({v00, v11, v01});
    }
  }
  for (int c = 0; c < m.num_cells(); ++c) m.cell_subdomain.push_back(subdomain_of(m.centroid(c)));

  std::map<std::uint64_t, std::pair<std::array<int, 2>, int>> count;
  for (const auto& c : m.cells) {
    for (int i = 0; i < 3; ++i) {
      const auto e = local_edge(c, i);
      auto [it, inserted] = count.try_emplace(edge_key(e[0], e[1]), e, 0);
      ++it->second.second;
    }
  }
  for (const auto& [key, entry] : count) {
    if (entry.second != 1) continue;
    const auto [a, b] = entry.first;
    const Point mid = 0.5 * (m.vertices[a] + m.vertices[b]);
    const int label = label_of(mid);
    m.boundary_edges.push_back({a, b, kind_of(label), label});
  }
  assign_longest_edge_refinement(m);
  return m;
}

int square_label(const Point& p) {
  if (std::abs(p.y()) < 1e-12) return kBottom;
  if (std::abs(p.x() - 1.0) < 1e-12) return kRight;
  if (std::abs(p.y() - 1.0) < 1e-12) return kTop;
  return kLeft;
}

std::function<BoundaryKind(int)> square_kinds(const SideTags& tags) {
  return [tags](int label) {
    switch (label) {
      case kBottom: return tags.bottom;
      case kRight: return tags.right;
      case kTop: return tags.top;
      default: return tags.left;
    }
  };
}

} // namespace

Mesh unit_square_mesh(int n, const SideTags& tags) {
  if (n < 1) throw InputError("unit_square_mesh requires n >= 1");
  return structured_mesh(
      n, n, 0.0, 0.0, 1.0 / n, [](int, int) { return true; }, [](const Point&) { return 1; },
      square_label, square_kinds(tags));
}

Mesh three_strip_square_mesh(int n, const SideTags& tags) {
  if (n < 3 || n % 3 != 0) {
    throw InputError("three-strip mesh requires n divisible by 3 so strips align with cells");
  }
  return structured_mesh(
      n, n, 0.0, 0.0, 1.0 / n, [](int, int) { return true; },
      [](const Point& c) { return c.x() < 1.0 / 3.0 ? 1 : (c.x() < 2.0 / 3.0 ? 2 : 3); },
      square_label, square_kinds(tags));
}

Mesh lshape_mesh(int n, const std::set<int>& dirichlet_labels) {
  if (n < 1) throw InputError("lshape_mesh requires n >= 1");
  auto label_of = [](const Point& p) {
    constexpr double tol = 1e-12;
    if (std::abs(p.y() + 1.0) < tol) return static_cast<int>(kLBottom);
    if (std::abs(p.x() - 1.0) < tol) return static_cast<int>(kLRight);
    if (std::abs(p.y() - 1.0) < tol) return static_cast<int>(kLTop);
    if (std::abs(p.x() + 1.0) < tol) return static_cast<int>(kLLeft);
    if (std::abs(p.x()) < tol) return static_cast<int>(kLNotchVert);
    return static_cast<int>(kLNotchHoriz);
  };
  return structured_mesh(
      2 * n, 2 * n, -1.0, -1.0, 1.0 / n, [n](int i, int j) { return !(i >= n && j < n); },
      [](const Point& c) { return c.y() > 0.0 ? (c.x() > 0.0 ? 1 : 2) : 3; }, label_of,
      [dirichlet_labels](int label) {
        return dirichlet_labels.contains(label) ? BoundaryKind::Dirichlet : BoundaryKind::Neumann;
      });
}

void set_dirichlet_labels(Mesh& mesh, const std::set<int>& dirichlet_labels) {
  for (auto& e : mesh.boundary_edges) {
    e.kind = dirichlet_labels.contains(e.label) ? BoundaryKind::Dirichlet : BoundaryKind::Neumann;
  }
}

RefinementResult refine(const Mesh& mesh, const std::vector<int>& marked) {
  const int nc = mesh.num_cells();
  std::unordered_map<std::uint64_t, int> edge_index;
  std::vector<std::array<int, 3>> cell_edges(nc);
  std::vector<std::array<int, 2>> edge_cells;
  for (int c = 0; c < nc; ++c) {
    for (int i = 0; i < 3; ++i) {
      const auto [p, q] = local_edge(mesh.cells[c], i);
      auto [it, inserted] = edge_index.try_emplace(edge_key(p, q), static_cast<int>(edge_cells.size()));
      if (inserted) edge_cells.push_back({c, -1});
      else edge_cells[it->second][1] = c;
      cell_edges[c][i] = it->second;
    }
  }

  std::vector<char> edge_marked(edge_cells.size(), 0);
  std::vector<int> work;
  auto mark_edge = [&](int e) {
    if (edge_marked[e]) return;
    edge_marked[e] = 1;
    for (int c : edge_cells[e]) {
      if (c >= 0) work.push_back(c);
    }
  };
  for (int c : marked) {
    if (c < 0 || c >= nc) throw InputError("marked cell index out of range");
    for (int e : cell_edges[c]) mark_edge(e);
  }
  // Closure: a cell with any split edge must split its refinement edge.
  while (!work.empty()) {
    const int c = work.back();
    work.pop_back();
    mark_edge(cell_edges[c][mesh.refinement_edge[c]]);
  }

  RefinementResult out;
  Mesh& m = out.mesh;
  m.vertices = mesh.vertices;
  std::vector<int> midpoint(edge_cells.size(), -1);
  for (int c = 0; c < nc; ++c) {
    for (int i = 0; i < 3; ++i) {
      const int e = cell_edges[c][i];
      if (edge_marked[e] && midpoint[e] < 0) {
        const auto [p, q] = local_edge(mesh.cells[c], i);
        midpoint[e] = m.num_vertices();
        m.vertices.push_back(0.5 * (mesh.vertices[p] + mesh.vertices[q]));
      }
    }
  }
  auto midpoint_of = [&](int a, int b) -> int {
    auto it = edge_index.find(edge_key(a, b));
    return (it == edge_index.end() || !edge_marked[it->second]) ? -1 : midpoint[it->second];
  };

  out.children.resize(nc);
  auto emit = [&](int parent, std::array<int, 3> cell, int ref) {
    out.children[parent].push_back(m.num_cells());
    m.cells.push_back(cell);
    m.cell_subdomain.push_back(mesh.cell_subdomain[parent]);
    m.refinement_edge.push_back(static_cast<std::uint8_t>(ref));
  };
  // Bisect recursively while the refinement edge carries a midpoint. The
  // new vertex is the newest vertex of both children, so each child's
  // refinement edge is the one opposite it.
  std::function<void(int, std::array<int, 3>, int)> bisect =
      [&](int parent, std::array<int, 3> cell, int r) {
        const int apex = cell[r];
        const int a = cell[(r + 1) % 3];
        const int b = cell[(r + 2) % 3];
        const int mid = midpoint_of(a, b);
        if (mid < 0) {
          emit(parent, cell, r);
          return;
        }
        bisect(parent, {a, mid, apex}, 1);
        bisect(parent, {mid, b, apex}, 0);
      };
  for (int c = 0; c < nc; ++c) bisect(c, mesh.cells[c], mesh.refinement_edge[c]);

  for (const auto& be : mesh.boundary_edges) {
    if (const int mid = midpoint_of(be.a, be.b); mid >= 0) {
      m.boundary_edges.push_back({be.a, mid, be.kind, be.label});
      m.boundary_edges.push_back({mid, be.b, be.kind, be.label});
    } else {
      m.boundary_edges.push_back(be);
    }
  }
  return out;
}

RefinementResult refine_uniform(const Mesh& mesh) {
  std::vector<int> all(mesh.cells.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return refine(mesh, all);
}

namespace {

struct LineReader {
  std::istream& in;
  int line_no = 0;

  // Next non-empty line with comments stripped; false at end of input.
  bool next(std::istringstream& tokens) {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      tokens.clear();
      tokens.str(line);
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw InputError("parse error at line " + std::to_string(line_no) + ": " + what);
  }
};

void finalize_loaded(Mesh& m) {
  for (int c = 0; c < m.num_cells(); ++c) {
    const double a = m.signed_area(c);
    if (a == 0.0) throw InputError("cell " + std::to_string(c) + " has zero area");
    if (a < 0.0) std::swap(m.cells[c][1], m.cells[c][2]);
  }
  assign_longest_edge_refinement(m);
  // Throws on non-conforming input or an untagged boundary edge.
  build_edge_topology(m);
  if (auto defect = conformity_defect(m); !defect.empty()) {
    throw InputError("non-conforming mesh: " + defect);
  }
}

} // namespace

Mesh read_native(std::istream& in) {
  LineReader r{in};
  std::istringstream t;
  if (!r.next(t)) r.fail("missing header");
  int nv = 0, nc = 0, nb = 0;
  if (!(t >> nv >> nc >> nb) || nv < 3 || nc < 1 || nb < 0) r.fail("header must be 'nv nc nb'");

  Mesh m;
  m.vertices.reserve(nv);
  for (int i = 0; i < nv; ++i) {
    if (!r.next(t)) r.fail("unexpected end of file in vertex block");
    double x = 0, y = 0;
    if (!(t >> x >> y)) r.fail("expected 'x y'");
    m.vertices.emplace_back(x, y);
  }
  for (int i = 0; i < nc; ++i) {
    if (!r.next(t)) r.fail("unexpected end of file in cell block");
    std::array<int, 3> c{};
    int sub = 0;
    if (!(t >> c[0] >> c[1] >> c[2] >> sub)) r.fail("expected 'a b c subdomain'");
    for (int v : c) {
      if (v < 0 || v >= nv) r.fail("vertex index out of range");
    }
    m.cells.push_back(c);
    m.cell_subdomain.push_back(sub);
  }
  for (int i = 0; i < nb; ++i) {
    if (!r.next(t)) r.fail("unexpected end of file in boundary block");
    BoundaryEdge e;
    std::string kind;
    if (!(t >> e.a >> e.b >> kind)) r.fail("expected 'a b D|N [label]'");
    if (e.a < 0 || e.a >= nv || e.b < 0 || e.b >= nv) r.fail("vertex index out of range");
    if (kind == "D") e.kind = BoundaryKind::Dirichlet;
    else if (kind == "N") e.kind = BoundaryKind::Neumann;
    else r.fail("boundary kind must be D or N, got '" + kind + "'");
    if (!(t >> e.label)) e.label = 0;
    m.boundary_edges.push_back(e);
  }
  finalize_loaded(m);
  return m;
}

Mesh read_msh2(std::istream& in, const std::set<int>& dirichlet_labels) {
  LineReader r{in};
  std::istringstream t;
  std::string word;
  std::unordered_map<long, int> node_index;
  std::vector<Point> nodes;
  std::vector<std::pair<std::array<int, 2>, int>> lines;
  Mesh m;

  while (r.next(t)) {
    t >> word;
    if (word == "$MeshFormat") {
      if (!r.next(t)) r.fail("truncated $MeshFormat");
      double version = 0;
      int file_type = -1;
      t >> version >> file_type;
      if (version < 2.0 || version >= 3.0) r.fail("only MSH 2.x is supported");
      if (file_type != 0) r.fail("only ASCII MSH files are supported");
      if (!r.next(t)) r.fail("truncated $MeshFormat");
    } else if (word == "$Nodes") {
      if (!r.next(t)) r.fail("truncated $Nodes");
      int count = 0;
      t >> count;
      for (int i = 0; i < count; ++i) {
        if (!r.next(t)) r.fail("truncated $Nodes");
        long id = 0;
        double x = 0, y = 0, z = 0;
        if (!(t >> id >> x >> y >> z)) r.fail("expected 'id x y z'");
        node_index[id] = static_cast<int>(nodes.size());
        nodes.emplace_back(x, y);
      }
      if (!r.next(t) || !(t >> word) || word != "$EndNodes") r.fail("expected $EndNodes");
    } else if (word == "$Elements") {
      if (!r.next(t)) r.fail("truncated $Elements");
      int count = 0;
      t >> count;
      for (int i = 0; i < count; ++i) {
        if (!r.next(t)) r.fail("truncated $Elements");
        long id = 0;
        int type = 0, ntags = 0;
        if (!(t >> id >> type >> ntags)) r.fail("expected 'id type ntags'");
        std::vector<int> tags(ntags);
        for (auto& g : tags) t >> g;
        const int physical = ntags > 0 ? tags[0] : 0;
        auto node = [&]() {
          long nid = 0;
          if (!(t >> nid)) r.fail("missing node id");
          auto it = node_index.find(nid);
          if (it == node_index.end()) r.fail("unknown node id " + std::to_string(nid));
          return it->second;
        };
        if (type == 1) {
          const int a = node();
          const int b = node();
          if (physical != 0) lines.push_back({{a, b}, physical});
        } else if (type == 2) {
          const int a = node();
          const int b = node();
          const int c = node();
          m.cells.push_back({a, b, c});
          m.cell_subdomain.push_back(physical);
        } else {
          r.fail("unsupported element type " + std::to_string(type) +
                 " (only 1 = line and 2 = triangle are accepted)");
        }
      }
      if (!r.next(t) || !(t >> word) || word != "$EndElements") r.fail("expected $EndElements");
    } else if (!word.empty() && word[0] == '$' && word.rfind("$End", 0) != 0) {
      // Skip unknown sections such as $PhysicalNames.
      const std::string end = "$End" + word.substr(1);
      while (r.next(t)) {
        t >> word;
        if (word == end) break;
      }
    }
  }
  if (m.cells.empty()) throw InputError("MSH file contains no triangles");

  // Keep only nodes referenced by triangles, in order of first use.
  std::vector<int> renumber(nodes.size(), -1);
  for (auto& c : m.cells) {
    for (int& v : c) {
      if (renumber[v] < 0) {
        renumber[v] = m.num_vertices();
        m.vertices.push_back(nodes[v]);
      }
      v = renumber[v];
    }
  }
  for (const auto& [ab, label] : lines) {
    if (renumber[ab[0]] < 0 || renumber[ab[1]] < 0) continue;
    const BoundaryKind kind =
        dirichlet_labels.contains(label) ? BoundaryKind::Dirichlet : BoundaryKind::Neumann;
    m.boundary_edges.push_back({renumber[ab[0]], renumber[ab[1]], kind, label});
  }
  finalize_loaded(m);
  return m;
}

Mesh load_mesh(const std::filesystem::path& path, MeshFormat format,
               const std::set<int>& dirichlet_labels) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open mesh file " + path.string());
  return format == MeshFormat::Native ? read_native(in) : read_msh2(in, dirichlet_labels);
}

void write_native(std::ostream& out, const Mesh& mesh) {
  out.precision(17);
  out << mesh.num_vertices() << ' ' << mesh.num_cells() << ' ' << mesh.boundary_edges.size()
      << '\n';
  for (const auto& p : mesh.vertices) out << p.x() << ' ' << p.y() << '\n';
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& v = mesh.cells[c];
    out << v[0] << ' ' << v[1] << ' ' << v[2] << ' ' << mesh.cell_subdomain[c] << '\n';
  }
  for (const auto& e : mesh.boundary_edges) {
    out << e.a << ' ' << e.b << ' ' << (e.kind == BoundaryKind::Dirichlet ? 'D' : 'N') << ' '
        << e.label << '\n';
  }
}

} // namespace elasteig
