// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "elasteig/adaptive.hpp"
#include "elasteig/eigensolve.hpp"
#include "elasteig/postprocess.hpp"
#include "elasteig/verify.hpp"
#include "oracles.hpp"

using namespace elasteig;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [violated]");
  }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

MaterialModel steel(double nu) {
  MaterialModel m;
  m.young[1] = 1.44e11;
  m.density = 7.7e3;
  m.poisson = nu;
  return m;
}

StudyConfig square_study(ElementFamily family, double nu) {
  StudyConfig c;
  for (int n : {20, 30, 40, 50}) c.meshes.push_back(unit_square_mesh(n));
  c.model = steel(nu);
  c.family = family;
  c.modes = {1, 2, 3, 4, 5, 6};
  c.estimate = false;
  return c;
}

std::vector<double> sqrt_spectrum(const Mesh& mesh, ElementFamily family, const MaterialModel& model, int k) {
  const EdgeTopology topo = build_edge_topology(mesh);
  const DofMap dofs = build_dof_map(mesh, topo, family);
  EigenOptions opts;
  opts.k = k;
  const EigenResult r = solve_eigen(SaddleSystem::from(assemble(mesh, dofs, model), model.poisson), opts);
  std::vector<double> out;
  for (double v : r.kappa_hats) out.push_back(std::sqrt(v));
  return out;
}

MaterialModel lshape_model() {
  MaterialModel m;
  m.young[1] = Expression("sqrt(x^2 + y^2 + 4)");
  m.young[2] = Expression("sqrt(x^2 + y^2 + 2)");
  m.young[3] = Expression("sqrt(x^2 + y^2 + 4)");
  m.poisson = 0.35;
  m.density = 1.0;
  return m;
}

// log-log interpolation of err at `dof` between the bracketing records
double interpolate_err(const ConvergenceHistory& h, double dof) {
  const auto d = h.dof_values();
  const auto e = h.errors(1);
  for (std::size_t i = 0; i + 1 < d.size(); ++i) {
    if (d[i] <= dof && dof <= d[i + 1]) {
      const double t = std::log(dof / d[i]) / std::log(d[i + 1] / d[i]);
      return std::exp((1 - t) * std::log(e[i]) + t * std::log(e[i + 1]));
    }
  }
  return std::nan("");
}

const double kSquareReference[6] = {2944.295, 7348.840, 7880.084, 12746.802, 13051.758, 14890.114};

Outcome ac1_ac2(Outcome& ac2) {
  Outcome o;
  const auto t0 = Clock::now();
  const ConvergenceHistory h = run_study(square_study(ElementFamily::TaylorHood, 0.35));
  const double elapsed = seconds_since(t0);
  o.require(h.failure.empty() && h.records.size() == 4, "study completed");
  if (!o.pass) return o;
  for (int m = 1; m <= 6; ++m) {
    const double v = std::sqrt(h.values(m).back());
    const double rel = std::abs(v - kSquareReference[m - 1]) / kSquareReference[m - 1];
    o.require(rel <= 2e-3, "mode " + std::to_string(m) + fmt(" %.4f rel %.2e", v, rel));
  }
  o.require(elapsed <= 120.0, fmt("runtime %.1f s", elapsed));

  const ReportTable t = build_table({{"nu=0.35", &h}});
  ac2.require(t.rows[0].order >= 1.2 && t.rows[0].order <= 1.6, fmt("mode 1 order %.3f in [1.2, 1.6]", t.rows[0].order));
  ac2.require(t.rows[2].order >= 2.0, fmt("mode 3 order %.3f >= 2.0", t.rows[2].order));
  return o;
}

Outcome ac3() {
  Outcome o;
  const Mesh mesh = unit_square_mesh(40);
  std::vector<std::vector<double>> f;
  const std::vector<double> nus = {0.35, 0.49, 0.49999, 0.5};
  for (double nu : nus) f.push_back(sqrt_spectrum(mesh, ElementFamily::TaylorHood, steel(nu), 6));
  double worst = 0.0;
  bool monotone = true;
  for (int m = 0; m < 6; ++m) {
    worst = std::max(worst, std::abs(f[2][m] - f[3][m]) / f[3][m]);
    for (std::size_t i = 1; i + 1 < nus.size(); ++i) {
      monotone = monotone && std::abs(f[i][m] - f[3][m]) <= std::abs(f[i - 1][m] - f[3][m]);
    }
  }
  o.require(worst <= 1e-3, fmt("max |f(0.49999) - f(0.5)| / f(0.5) = %.2e", worst));
  o.require(monotone, "distance to nu = 0.5 nonincreasing in nu");
  return o;
}

Outcome ac4() {
  Outcome o;
  const ConvergenceHistory h = run_study(square_study(ElementFamily::Mini, 0.5));
  o.require(h.failure.empty(), "study completed");
  if (!o.pass) return o;
  const double v = std::sqrt(h.values(3).back());
  const double rel = std::abs(v - 8067.649) / 8067.649;
  o.require(rel <= 3e-3, fmt("mode 3 at n=50 %.4f rel %.2e", v, rel));
  const ReportTable t = build_table({{"nu=0.5", &h}});
  o.require(t.rows[2].order >= 1.8 && t.rows[2].order <= 2.2, fmt("mode 3 order %.3f in [1.8, 2.2]", t.rows[2].order));
  return o;
}

Outcome ac5() {
  Outcome o;
  StudyConfig c;
  const SideTags clamped{BoundaryKind::Dirichlet, BoundaryKind::Dirichlet, BoundaryKind::Dirichlet,
                         BoundaryKind::Dirichlet};
  for (int n : {21, 30, 39, 48}) c.meshes.push_back(three_strip_square_mesh(n, clamped));
  c.model.young = {{1, 2.0}, {2, 1.0}, {3, 3.0}};
  c.model.poisson = 0.49999;
  c.estimate = false;
  const ConvergenceHistory h = run_study(c);
  o.require(h.failure.empty(), "study completed");
  if (!o.pass) return o;
  const ReportTable t = build_table({{"strips", &h}});
  const double rel = std::abs(t.rows[0].extrapolated - 5.7777) / 5.7777;
  o.require(rel <= 5e-3, fmt("extrapolated %.4f rel %.2e", t.rows[0].extrapolated, rel));
  o.require(t.rows[0].order >= 2.0 && t.rows[0].order <= 2.6, fmt("order %.3f in [2.0, 2.6]", t.rows[0].order));
  return o;
}

Outcome ac6() {
  Outcome o;
  const auto t0 = Clock::now();
  const double ref = 2.66229608762752 * 2.66229608762752;
  StudyConfig u;
  for (int n : {4, 8, 16, 32, 64}) u.meshes.push_back(lshape_mesh(n));
  u.model = lshape_model();
  u.family = ElementFamily::Mini;
  u.references = {{1, ref, "published reference"}};
  u.eigen.k = 1;
  const ConvergenceHistory hu = run_study(u);

  StudyConfig a = u;
  a.meshes.clear();
  a.initial_mesh = lshape_mesh(4);
  a.loop = LoopKind::Adaptive;
  a.max_iterations = 40;
  a.max_dofs = 300000;
  const ConvergenceHistory ha = run_study(a);
  const double elapsed = seconds_since(t0);
  o.require(hu.failure.empty() && ha.failure.empty(), "studies completed");
  if (!o.pass) return o;

  const RateFit ru = fit_rate(hu, RateAxis::Dofs, 1);
  const RateFit ra = fit_rate(ha, RateAxis::Dofs, 1);
  o.require(ru.slope >= -0.55 && ru.slope <= -0.40, fmt("uniform dof-rate %.3f in [-0.55, -0.40]", ru.slope));
  o.require(ra.slope >= -1.10 && ra.slope <= -0.90, fmt("adaptive dof-rate %.3f in [-1.10, -0.90]", ra.slope));
  const double dof = static_cast<double>(ha.records.back().dofs);
  const double err_a = ha.records.back().err[0];
  const double err_u = std::exp(ru.intercept) * std::pow(dof, ru.slope);
  o.require(err_u / err_a >= 3.0, fmt("final adaptive err %.3e vs uniform fit %.3e", err_a, err_u) +
                                      fmt(" at %.0f dofs (factor %.2f)", dof, err_u / err_a));
  const double dof_u = static_cast<double>(hu.records.back().dofs);
  const double ratio = hu.records.back().err[0] / interpolate_err(ha, dof_u);
  o.detail += fmt("; at the finest uniform level (%.0f dofs) the factor is %.2f", dof_u, ratio);
  o.require(elapsed <= 300.0, fmt("runtime %.1f s", elapsed));
  return o;
}

Outcome ac7() {
  Outcome o;
  std::vector<std::vector<double>> effs;
  std::vector<long> dofs;
  for (double e : {10.0, 1e2, 1e4}) {
    StudyConfig c;
    for (int n : {4, 8, 16, 32}) c.meshes.push_back(unit_square_mesh(n));
    c.model.young[1] = e;
    c.model.poisson = 0.5;
    c.family = ElementFamily::Mini;
    c.references = {{1, 0.492273855811713 * e, "published reference"}};
    c.eigen.k = 2;
    const ConvergenceHistory h = run_study(c);
    if (!h.failure.empty()) {
      o.require(false, h.failure);
      return o;
    }
    effs.emplace_back();
    dofs.clear();
    for (const auto& r : h.records) {
      effs.back().push_back(r.eff);
      dofs.push_back(r.dofs);
    }
  }
  double lo = 1e300, hi = 0.0, drift = 0.0;
  for (std::size_t l = 0; l < dofs.size(); ++l) {
    for (const auto& col : effs) drift = std::max(drift, std::abs(col[l] - effs[0][l]) / effs[0][l]);
    if (dofs[l] < 600) continue;
    for (const auto& col : effs) {
      lo = std::min(lo, col[l]);
      hi = std::max(hi, col[l]);
    }
  }
  o.require(lo >= 0.06 && hi <= 0.11, fmt("eff in [%.4f, %.4f] on levels with >= 600 dofs", lo, hi));
  o.require(drift <= 1e-8, fmt("max relative change across E %.2e", drift));
  return o;
}

Outcome ac8() {
  Outcome o;
  int meshes = 0;
  double worst = 0.0;
  std::vector<Mesh> pool;
  for (int n = 1; n <= 5; ++n) pool.push_back(unit_square_mesh(n));
  pool.push_back(three_strip_square_mesh(3));
  for (int n = 1; n <= 2; ++n) pool.push_back(lshape_mesh(n));
  pool.push_back(refine(lshape_mesh(1), {1, 4}).mesh);
  pool.push_back(refine(unit_square_mesh(2), {0}).mesh);
  for (auto family : {ElementFamily::TaylorHood, ElementFamily::Mini}) {
    for (double nu : {0.2, 0.35, 0.49, 0.49999, 0.5}) {
      for (const Mesh& mesh : pool) {
        MaterialModel m;
        for (int tag : {1, 2, 3}) m.young[tag] = Expression("1 + x^2 + y^2 + " + std::to_string(tag));
        m.poisson = nu;
        const EdgeTopology topo = build_edge_topology(mesh);
        const DofMap dofs = build_dof_map(mesh, topo, family);
        if (dofs.num_unknowns() > 500) continue;
        const SystemMatrices sys = assemble(mesh, dofs, m);
        const auto dense = oracle::saddle_eigenvalues(sys.A, sys.B, sys.C, sys.M);
        if (dense.size() < 6) continue;
        const EigenResult r = solve_eigen(SaddleSystem::from(sys, nu));
        for (int i = 0; i < 6; ++i) worst = std::max(worst, std::abs(r.kappas[i] - dense[i]) / dense[i]);
        ++meshes;
      }
    }
  }
  o.require(meshes > 0, std::to_string(meshes) + " discretizations");
  o.require(worst <= 1e-8, fmt("max relative deviation %.2e", worst));
  return o;
}

Outcome ac9() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto results = run_verify();
  const double elapsed = seconds_since(t0);
  for (const auto& r : results) {
    if (!r.passed) o.require(false, r.name + ": " + r.detail);
  }
  o.require(true, std::to_string(results.size()) + " invariants");
  o.require(elapsed <= 60.0, fmt("runtime %.1f s", elapsed));
  return o;
}

} // namespace

int main() {
  bool all = true;
  auto report = [&](const char* id, const Outcome& o) {
    std::printf("%s %s: %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  };
  Outcome ac2;
  const Outcome ac1 = ac1_ac2(ac2);
  report("AC-1", ac1);
  report("AC-2", ac2);
  report("AC-3", ac3());
  report("AC-4", ac4());
  report("AC-5", ac5());
  report("AC-6", ac6());
  report("AC-7", ac7());
  report("AC-8", ac8());
  report("AC-9", ac9());
  return all ? 0 : 1;
}
