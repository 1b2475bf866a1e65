#include "elasteig/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "elasteig/adaptive.hpp"
#include "elasteig/dense_oracle.hpp"
#include "elasteig/eigensolve.hpp"
#include "elasteig/error.hpp"
#include "elasteig/estimator.hpp"

namespace elasteig {

namespace {

struct Check {
  std::string name;
  std::function<CheckResult(bool corrupt)> run;
};

CheckResult result(const std::string& name, bool ok, const std::string& detail) {
  return {name, ok, detail};
}

std::string sci(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

MaterialModel graded_material(double nu) {
  MaterialModel m;
  for (int tag : {1, 2, 3}) m.young[tag] = Expression("2 + x*y + x^2 + " + std::to_string(tag));
  m.poisson = nu;
  m.density = 1.3;
  return m;
}

double asymmetry(const SparseMatrix& a) {
  const SparseMatrix d = SparseMatrix(a.transpose()) - a;
  const double n = a.norm();
  return n > 0.0 ? d.norm() / n : d.norm();
}

CheckResult check_symmetry(bool corrupt) {
  double worst = 0.0;
  for (auto family : {ElementFamily::TaylorHood, ElementFamily::Mini}) {
    for (double nu : {0.35, 0.5}) {
      const Mesh mesh = unit_square_mesh(3);
      const EdgeTopology topo = build_edge_topology(mesh);
      const DofMap dofs = build_dof_map(mesh, topo, family);
      SystemMatrices sys = assemble(mesh, dofs, graded_material(nu));
      if (corrupt) sys.A.coeffRef(0, 1) += 1e-3 * sys.A.norm();
      const SaddleSystem s = SaddleSystem::from(sys, nu);
      const std::initializer_list<const SparseMatrix*> mats = {&sys.A, &sys.M, &s.K};
      for (const SparseMatrix* m : mats) worst = std::max(worst, asymmetry(*m));
      if (sys.C.nonZeros() > 0) worst = std::max(worst, asymmetry(sys.C));
    }
  }
  return result("symmetry", worst <= 1e-13, "max relative asymmetry " + sci(worst));
}

CheckResult check_rigid_kernel(bool corrupt) {
  double worst = 0.0;
  for (auto family : {ElementFamily::TaylorHood, ElementFamily::Mini}) {
    const Mesh mesh = lshape_mesh(2);
    const EdgeTopology topo = build_edge_topology(mesh);
    const DofMap dofs = build_dof_map_unconstrained(mesh, topo, family);
    const FormMatrices f = assemble_full(mesh, dofs, graded_material(0.3));
    const std::vector<VectorField> motions = {
        [](const Point&) { return Eigen::Vector2d(1.0, 0.0); },
        [](const Point&) { return Eigen::Vector2d(0.0, 1.0); },
        [&](const Point& p) { return Eigen::Vector2d(-p.y(), p.x() + (corrupt ? 0.5 * p.x() : 0.0)); },
    };
    for (const auto& r : motions) {
      const Vector v = interpolate_displacement(dofs, r);
      const double scale = f.A.norm() * v.norm();
      worst = std::max(worst, (f.A * v).norm() / scale);
      worst = std::max(worst, (f.B * v).norm() / (f.B.norm() * v.norm()));
    }
  }
  return result("rigid_body_kernel", worst <= 1e-12, "max relative |A r|, |B r| " + sci(worst));
}

CheckResult check_oracle(bool corrupt) {
  double worst = 0.0;
  for (auto family : {ElementFamily::TaylorHood, ElementFamily::Mini}) {
    for (double nu : {0.35, 0.49999, 0.5}) {
      for (int n : {2, 3}) {
        const Mesh mesh = unit_square_mesh(n);
        const EdgeTopology topo = build_edge_topology(mesh);
        const DofMap dofs = build_dof_map(mesh, topo, family);
        const SystemMatrices sys = assemble(mesh, dofs, graded_material(nu));
        const SaddleSystem s = SaddleSystem::from(sys, nu);
        const EigenResult eig = solve_eigen(s);
        std::vector<double> dense = dense_reference_eigenvalues(sys);
        if (corrupt) dense[2] *= 1.0 + 1e-6;
        for (int i = 0; i < 6; ++i) {
          worst = std::max(worst, std::abs(eig.kappas[i] - dense[i]) / dense[i]);
        }
      }
    }
  }
  return result("oracle_equivalence", worst <= 1e-8, "max relative deviation " + sci(worst));
}

struct SolvedProblem {
  Mesh mesh;
  EdgeTopology topo;
  DofMap dofs;
  MaterialModel model;
  ProjectedCoefficients proj;
  EigenResult eig;
  DiscretePair pair;
};

SolvedProblem solve_problem(Mesh mesh, MaterialModel model, ElementFamily family,
                            std::uint64_t seed = EigenOptions{}.seed) {
  SolvedProblem p;
  p.mesh = std::move(mesh);
  p.model = std::move(model);
  p.topo = build_edge_topology(p.mesh);
  p.dofs = build_dof_map(p.mesh, p.topo, family);
  const SystemMatrices sys = assemble(p.mesh, p.dofs, p.model);
  const SaddleSystem s = SaddleSystem::from(sys, p.model.poisson);
  EigenOptions opts;
  opts.k = 2;
  opts.seed = seed;
  p.eig = solve_eigen(s, opts);
  p.proj = project_coefficients(p.model, p.mesh);
  const int nd = p.dofs.num_free_displacement();
  p.pair = {p.eig.kappas[0], expand_displacement(p.dofs, p.eig.displacement(0, nd)),
            p.eig.pressure(0, nd)};
  return p;
}

CheckResult check_dirichlet_jump(bool corrupt) {
  MaterialModel m = graded_material(0.35);
  const SolvedProblem p = solve_problem(unit_square_mesh(4), m, ElementFamily::TaylorHood);
  EdgeTopology topo = p.topo;
  if (corrupt) {
    for (auto& e : topo.edges) {
      if (e.kind == EdgeClass::Dirichlet) e.kind = EdgeClass::Neumann;
    }
  }
  const EstimatorContext ctx(p.mesh, topo, p.dofs, p.model, p.proj);
  double worst = 0.0;
  int count = 0;
  for (int e = 0; e < p.topo.num_edges(); ++e) {
    if (p.topo.edges[e].kind != EdgeClass::Dirichlet) continue;
    worst = std::max(worst, std::abs(edge_jump(ctx, e, p.pair)));
    ++count;
  }
  return result("dirichlet_jump_nullity", count > 0 && worst == 0.0,
                std::to_string(count) + " Dirichlet edges, max term " + sci(worst));
}

CheckResult check_theta_zero(bool corrupt) {
  MaterialModel m;
  m.young[1] = 2.0;
  m.young[2] = 1.0;
  m.young[3] = corrupt ? YoungField(Expression("3 + x")) : YoungField(3.0);
  m.poisson = 0.35;
  const SolvedProblem p = solve_problem(three_strip_square_mesh(6), m, ElementFamily::TaylorHood);
  const EstimatorContext ctx(p.mesh, p.topo, p.dofs, p.model, p.proj);
  double worst = 0.0;
  for (int c = 0; c < p.mesh.num_cells(); ++c) {
    worst = std::max(worst, std::sqrt(oscillation(ctx, c, p.pair)));
  }
  return result("oscillation_vanishes_for_piecewise_constant_E", worst <= 1e-13,
                "max Theta_K " + sci(worst));
}

CheckResult check_marking_invariance(bool corrupt) {
  const SolvedProblem p =
      solve_problem(lshape_mesh(3), graded_material(0.35), ElementFamily::Mini);
  const EstimatorContext ctx(p.mesh, p.topo, p.dofs, p.model, p.proj);
  const ErrorIndicators ind = assemble_indicators(ctx, p.pair);
  const std::vector<int> base = mark(ind, 0.5);
  bool same = !base.empty();
  for (double c : {1e-8, 0.37, 1e3, 1e12}) {
    ErrorIndicators scaled = ind;
    for (int k = 0; k < scaled.size(); ++k) {
      // indicators enter squared
      const double f = corrupt && k % 2 == 0 ? c * c * 1.7 : c * c;
      scaled.eta_K_sq[k] *= f;
      scaled.eta_J_sq[k] *= f;
      scaled.theta_sq[k] *= f;
    }
    same = same && mark(scaled, 0.5) == base;
  }
  return result("marking_scale_invariance", same,
                std::to_string(base.size()) + " of " + std::to_string(ind.size()) + " cells marked");
}

CheckResult check_refinement(bool corrupt) {
  std::mt19937_64 rng(7);
  Mesh mesh = lshape_mesh(2);
  const double area = mesh.total_area();
  std::string defect;
  double worst = 0.0;
  for (int round = 0; round < 5 && defect.empty(); ++round) {
    std::vector<int> marked;
    for (int c = 0; c < mesh.num_cells(); ++c) {
      if (rng() % 4 == 0) marked.push_back(c);
    }
    if (marked.empty()) marked.push_back(0);
    RefinementResult r = refine(mesh, marked);
    if (corrupt && round == 2) {
      r.mesh.cells.pop_back();
      r.mesh.cell_subdomain.pop_back();
      r.mesh.refinement_edge.pop_back();
    }
    mesh = std::move(r.mesh);
    worst = std::max(worst, std::abs(mesh.total_area() - area) / area);
    defect = conformity_defect(mesh);
  }
  const bool ok = defect.empty() && worst <= 1e-12;
  return result("refinement_area_and_conformity", ok,
                defect.empty() ? "area drift " + sci(worst) : defect);
}

CheckResult check_determinism(bool corrupt) {
  auto once = [](std::uint64_t seed) {
    const SolvedProblem p =
        solve_problem(lshape_mesh(3), graded_material(0.49), ElementFamily::Mini, seed);
    const EstimatorContext ctx(p.mesh, p.topo, p.dofs, p.model, p.proj);
    const ErrorIndicators ind = assemble_indicators(ctx, p.pair);
    std::vector<double> out = p.eig.kappas;
    out.push_back(ind.eta);
    for (int i = 0; i < p.pair.u.size(); ++i) out.push_back(p.pair.u[i]);
    return out;
  };
  const auto a = once(EigenOptions{}.seed);
  const auto b = once(corrupt ? EigenOptions{}.seed + 1 : EigenOptions{}.seed);
  const bool same = a == b;
  return result("determinism_single_thread", same,
                same ? "repeated solve is bitwise identical" : "repeated solve differs");
}

CheckResult check_scale_invariance(bool corrupt) {
  // Unit square, incompressible limit, first mode: kappa_hat_ref = 0.492273855811713 E.
  constexpr double slope = 0.492273855811713;
  std::vector<double> eff;
  for (double e : {10.0, 1e2, 1e4}) {
    MaterialModel m;
    m.young[1] = e;
    m.poisson = 0.5;
    const SolvedProblem p = solve_problem(unit_square_mesh(6), m, ElementFamily::Mini);
    const EstimatorContext ctx(p.mesh, p.topo, p.dofs, p.model, p.proj);
    const ErrorIndicators ind = assemble_indicators(ctx, p.pair);
    const double ref = slope * (corrupt ? 10.0 : e);
    eff.push_back(effectivity(std::abs(p.eig.kappa_hats[0] - ref), ind.eta));
  }
  double worst = 0.0;
  for (double v : eff) worst = std::max(worst, std::abs(v - eff[0]) / eff[0]);
  return result("effectivity_scale_invariance", worst <= 1e-8,
                "eff " + sci(eff[0]) + ", max relative change " + sci(worst));
}

const std::vector<Check>& checks() {
  static const std::vector<Check> all = {
      {"symmetry", check_symmetry},
      {"rigid_body_kernel", check_rigid_kernel},
      {"oracle_equivalence", check_oracle},
      {"dirichlet_jump_nullity", check_dirichlet_jump},
      {"oscillation_vanishes_for_piecewise_constant_E", check_theta_zero},
      {"marking_scale_invariance", check_marking_invariance},
      {"refinement_area_and_conformity", check_refinement},
      {"determinism_single_thread", check_determinism},
      {"effectivity_scale_invariance", check_scale_invariance},
  };
  return all;
}

} // namespace

std::vector<std::string> verify_check_names() {
  std::vector<std::string> names;
  for (const auto& c : checks()) names.push_back(c.name);
  return names;
}

std::vector<CheckResult> run_verify(const std::string& inject_fault) {
  const auto names = verify_check_names();
  if (!inject_fault.empty() &&
      std::find(names.begin(), names.end(), inject_fault) == names.end()) {
    throw InputError("unknown check '" + inject_fault + "'");
  }
  std::vector<CheckResult> out;
  for (const auto& c : checks()) {
    try {
      out.push_back(c.run(c.name == inject_fault));
    } catch (const Error& e) {
      out.push_back({c.name, false, std::string("error: ") + e.what()});
    }
  }
  return out;
}

} // namespace elasteig
