#include "elasteig/fem.hpp"

#include <algorithm>
#include <ostream>

#include <Eigen/LU>

#include "elasteig/error.hpp"
#include "elasteig/quadrature.hpp"

namespace elasteig {

std::string to_string(ElementFamily family) {
  return family == ElementFamily::TaylorHood ? "taylor_hood" : "mini";
}

ElementFamily element_family_from_string(const std::string& name) {
  if (name == "taylor_hood") return ElementFamily::TaylorHood;
  if (name == "mini") return ElementFamily::Mini;
  throw InputError("unknown element family '" + name + "' (expected taylor_hood or mini)");
}

CellGeometry CellGeometry::of(const Mesh& mesh, int cell) {
  const auto& v = mesh.cells[cell];
  CellGeometry g;
  g.origin = mesh.vertices[v[0]];
  g.jacobian.col(0) = mesh.vertices[v[1]] - g.origin;
  g.jacobian.col(1) = mesh.vertices[v[2]] - g.origin;
  const double det = g.jacobian.determinant();
  if (!(det > 0.0)) {
    throw InputError("singular geometry: cell " + std::to_string(cell) + " has zero or negative area");
  }
  g.area = 0.5 * det;
  const Eigen::Matrix2d inv = g.jacobian.inverse();
  g.grad_bary[1] = inv.row(0).transpose();
  g.grad_bary[2] = inv.row(1).transpose();
  g.grad_bary[0] = -g.grad_bary[1] - g.grad_bary[2];
  return g;
}

int nodes_per_cell(ElementFamily family) { return family == ElementFamily::TaylorHood ? 6 : 4; }

ShapeValues displacement_shapes(ElementFamily family, const CellGeometry& geo,
                                const Eigen::Vector2d& ref) {
  const std::array<double, 3> L = {1.0 - ref.x() - ref.y(), ref.x(), ref.y()};
  const auto& G = geo.grad_bary;
  auto sym_outer = [](const Point& a, const Point& b) -> Eigen::Matrix2d {
    return a * b.transpose() + b * a.transpose();
  };
  ShapeValues s;
  if (family == ElementFamily::TaylorHood) {
    s.count = 6;
    for (int i = 0; i < 3; ++i) {
      s.value[i] = L[i] * (2.0 * L[i] - 1.0);
      s.grad[i] = (4.0 * L[i] - 1.0) * G[i];
      s.hessian[i] = 4.0 * G[i] * G[i].transpose();
      const int j = (i + 1) % 3;
      const int k = (i + 2) % 3;
      s.value[3 + i] = 4.0 * L[j] * L[k];
      s.grad[3 + i] = 4.0 * (L[k] * G[j] + L[j] * G[k]);
      s.hessian[3 + i] = 4.0 * sym_outer(G[j], G[k]);
    }
  } else {
    s.count = 4;
    for (int i = 0; i < 3; ++i) {
      s.value[i] = L[i];
      s.grad[i] = G[i];
      s.hessian[i].setZero();
    }
    s.value[3] = 27.0 * L[0] * L[1] * L[2];
    s.grad[3] = 27.0 * (L[1] * L[2] * G[0] + L[0] * L[2] * G[1] + L[0] * L[1] * G[2]);
    s.hessian[3] = 27.0 * (L[2] * sym_outer(G[0], G[1]) + L[1] * sym_outer(G[0], G[2]) +
                           L[0] * sym_outer(G[1], G[2]));
  }
  return s;
}

namespace {

DofMap make_dof_map(const Mesh& mesh, const EdgeTopology& topo, ElementFamily family,
                    bool require_dirichlet) {
  DofMap d;
  d.family = family;
  const int nv = mesh.num_vertices();
  d.num_pressure = nv;
  d.cell_nodes.resize(mesh.cells.size());
  d.anchors = mesh.vertices;
  if (family == ElementFamily::TaylorHood) {
    d.num_nodes = nv + topo.num_edges();
    for (const auto& e : topo.edges) {
      d.anchors.push_back(0.5 * (mesh.vertices[e.vertices[0]] + mesh.vertices[e.vertices[1]]));
    }
    for (int c = 0; c < mesh.num_cells(); ++c) {
      for (int i = 0; i < 3; ++i) {
        d.cell_nodes[c][i] = mesh.cells[c][i];
        d.cell_nodes[c][3 + i] = nv + topo.cell_edges[c][i];
      }
    }
  } else {
    d.num_nodes = nv + mesh.num_cells();
    for (int c = 0; c < mesh.num_cells(); ++c) {
      d.anchors.push_back(mesh.centroid(c));
      for (int i = 0; i < 3; ++i) d.cell_nodes[c][i] = mesh.cells[c][i];
      d.cell_nodes[c][3] = nv + c;
      d.cell_nodes[c][4] = d.cell_nodes[c][5] = -1;
    }
  }

  d.node_on_dirichlet.assign(d.num_nodes, 0);
  for (int k = 0; k < topo.num_edges(); ++k) {
    const auto& e = topo.edges[k];
    if (e.kind != EdgeClass::Dirichlet) continue;
    d.node_on_dirichlet[e.vertices[0]] = 1;
    d.node_on_dirichlet[e.vertices[1]] = 1;
    if (family == ElementFamily::TaylorHood) d.node_on_dirichlet[nv + k] = 1;
  }
  d.free_index.assign(d.num_displacement(), -1);
  for (int node = 0; node < d.num_nodes; ++node) {
    for (int comp = 0; comp < 2; ++comp) {
      const int dof = 2 * node + comp;
      if (d.node_on_dirichlet[node]) {
        d.dirichlet_dofs.push_back(dof);
      } else {
        d.free_index[dof] = static_cast<int>(d.free_dofs.size());
        d.free_dofs.push_back(dof);
      }
    }
  }
  if (require_dirichlet && d.dirichlet_dofs.empty()) {
    throw InputError("empty Dirichlet boundary: the displacement must be fixed on a part of "
                     "the boundary with positive length");
  }
  return d;
}

} // namespace

DofMap build_dof_map(const Mesh& mesh, const EdgeTopology& topo, ElementFamily family) {
  return make_dof_map(mesh, topo, family, true);
}

DofMap build_dof_map_unconstrained(const Mesh& mesh, const EdgeTopology& topo,
                                   ElementFamily family) {
  return make_dof_map(mesh, topo, family, false);
}

FormMatrices assemble_full(const Mesh& mesh, const DofMap& dofs, const MaterialModel& model,
                           const AssemblyOptions& opts) {
  check_compatible(model, mesh);
  const auto& rule = quadrature_rule(opts.quad_degree);
  const int np = nodes_per_cell(dofs.family);
  const int nu = 2 * np;
  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> ta, tb, tc, tm;
  ta.reserve(mesh.cells.size() * nu * nu);
  tm.reserve(mesh.cells.size() * nu * nu);
  tb.reserve(mesh.cells.size() * 3 * nu);
  tc.reserve(mesh.cells.size() * 9);

  Eigen::MatrixXd a_loc(nu, nu), m_loc(nu, nu), b_loc(3, nu);
  Eigen::Matrix3d c_loc;
  const double rho = model.density;

  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry geo = CellGeometry::of(mesh, c);
    const int sub = mesh.cell_subdomain[c];
    a_loc.setZero();
    m_loc.setZero();
    b_loc.setZero();
    c_loc.setZero();
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const Eigen::Vector2d& ref = rule.points[q];
      const Point x = geo.map(ref);
      const double w = rule.weights[q] * 2.0 * geo.area;
      const double mu = evaluate_mu(model, x, sub);
      const double linv = evaluate_lambda_inv(model, x, sub);
      const ShapeValues s = displacement_shapes(dofs.family, geo, ref);
      const std::array<double, 3> psi = {1.0 - ref.x() - ref.y(), ref.x(), ref.y()};

      for (int i = 0; i < np; ++i) {
        for (int a = 0; a < 2; ++a) {
          const int r = 2 * i + a;
          for (int j = i; j < np; ++j) {
            const double gg = s.grad[i].dot(s.grad[j]);
            const double mm = w * rho * s.value[i] * s.value[j];
            for (int b = (j == i ? a : 0); b < 2; ++b) {
              const int col = 2 * j + b;
              double val = s.grad[i][b] * s.grad[j][a];
              if (a == b) {
                val += gg;
                m_loc(r, col) += mm;
              }
              a_loc(r, col) += w * mu * val;
            }
          }
        }
      }
      for (int k = 0; k < 3; ++k) {
        for (int j = 0; j < np; ++j) {
          for (int b = 0; b < 2; ++b) b_loc(k, 2 * j + b) -= w * psi[k] * s.grad[j][b];
        }
        for (int l = k; l < 3; ++l) c_loc(k, l) += w * linv * psi[k] * psi[l];
      }
    }

    const auto& nodes = dofs.cell_nodes[c];
    const auto& verts = mesh.cells[c];
    auto gdof = [&](int local) { return 2 * nodes[local / 2] + local % 2; };
    for (int r = 0; r < nu; ++r) {
      for (int col = r; col < nu; ++col) {
        const double av = a_loc(r, col);
        const double mv = m_loc(r, col);
        ta.emplace_back(gdof(r), gdof(col), av);
        if (mv != 0.0) tm.emplace_back(gdof(r), gdof(col), mv);
        if (col != r) {
          ta.emplace_back(gdof(col), gdof(r), av);
          if (mv != 0.0) tm.emplace_back(gdof(col), gdof(r), mv);
        }
      }
    }
    for (int k = 0; k < 3; ++k) {
      for (int col = 0; col < nu; ++col) tb.emplace_back(verts[k], gdof(col), b_loc(k, col));
      if (model.stokes_limit()) continue;
      for (int l = k; l < 3; ++l) {
        tc.emplace_back(verts[k], verts[l], c_loc(k, l));
        if (l != k) tc.emplace_back(verts[l], verts[k], c_loc(k, l));
      }
    }
  }

  const int nd = dofs.num_displacement();
  const int npr = dofs.num_pressure;
  FormMatrices f;
  f.A.resize(nd, nd);
  f.M.resize(nd, nd);
  f.B.resize(npr, nd);
  f.C.resize(npr, npr);
  f.A.setFromTriplets(ta.begin(), ta.end());
  f.M.setFromTriplets(tm.begin(), tm.end());
  f.B.setFromTriplets(tb.begin(), tb.end());
  f.C.setFromTriplets(tc.begin(), tc.end());
  return f;
}

SystemMatrices restrict_to_free(const FormMatrices& full, const DofMap& dofs) {
  const int nf = dofs.num_free_displacement();
  using Triplet = Eigen::Triplet<double>;
  auto restrict_square = [&](const SparseMatrix& m) {
    std::vector<Triplet> t;
    t.reserve(m.nonZeros());
    for (int k = 0; k < m.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
        const int r = dofs.free_index[it.row()];
        const int c = dofs.free_index[it.col()];
        if (r >= 0 && c >= 0) t.emplace_back(r, c, it.value());
      }
    }
    SparseMatrix out(nf, nf);
    out.setFromTriplets(t.begin(), t.end());
    return out;
  };
  SystemMatrices s;
  s.num_free_displacement = nf;
  s.num_pressure = dofs.num_pressure;
  s.A = restrict_square(full.A);
  s.M = restrict_square(full.M);
  s.C = full.C;
  std::vector<Triplet> t;
  for (int k = 0; k < full.B.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(full.B, k); it; ++it) {
      const int c = dofs.free_index[it.col()];
      if (c >= 0) t.emplace_back(it.row(), c, it.value());
    }
  }
  s.B.resize(dofs.num_pressure, nf);
  s.B.setFromTriplets(t.begin(), t.end());
  return s;
}

SystemMatrices assemble(const Mesh& mesh, const DofMap& dofs, const MaterialModel& model,
                        const AssemblyOptions& opts) {
  return restrict_to_free(assemble_full(mesh, dofs, model, opts), dofs);
}

Vector interpolate_displacement(const DofMap& dofs, const VectorField& f) {
  Vector u = Vector::Zero(dofs.num_displacement());
  const int vertex_like = dofs.family == ElementFamily::Mini ? dofs.num_pressure : dofs.num_nodes;
  for (int node = 0; node < vertex_like; ++node) {
    const Eigen::Vector2d v = f(dofs.anchors[node]);
    u[2 * node] = v.x();
    u[2 * node + 1] = v.y();
  }
  return u;
}

Vector interpolate_pressure(const Mesh& mesh, const ScalarField& f) {
  Vector p(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) p[v] = f(mesh.vertices[v]);
  return p;
}

Vector expand_displacement(const DofMap& dofs, const Vector& reduced) {
  Vector full = Vector::Zero(dofs.num_displacement());
  for (int i = 0; i < dofs.num_free_displacement(); ++i) full[dofs.free_dofs[i]] = reduced[i];
  return full;
}

Vector reduce_displacement(const DofMap& dofs, const Vector& full) {
  Vector r(dofs.num_free_displacement());
  for (int i = 0; i < dofs.num_free_displacement(); ++i) r[i] = full[dofs.free_dofs[i]];
  return r;
}

DisplacementSample evaluate_displacement(const DofMap& dofs, const CellGeometry& geo, int cell,
                                         const Vector& u_full, const Eigen::Vector2d& ref) {
  const ShapeValues s = displacement_shapes(dofs.family, geo, ref);
  DisplacementSample out;
  for (int i = 0; i < s.count; ++i) {
    const int node = dofs.cell_nodes[cell][i];
    for (int a = 0; a < 2; ++a) {
      const double coef = u_full[2 * node + a];
      out.value[a] += coef * s.value[i];
      out.grad.row(a) += coef * s.grad[i].transpose();
    }
  }
  return out;
}

void write_matrix_market(std::ostream& out, const SparseMatrix& m) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  out.precision(17);
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
    }
  }
}

} // namespace elasteig
