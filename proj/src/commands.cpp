#include "elasteig/commands.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>

#include "elasteig/config.hpp"
#include "elasteig/error.hpp"
#include "elasteig/estimator.hpp"
#include "elasteig/postprocess.hpp"
#include "elasteig/verify.hpp"

#ifndef ELASTEIG_VERSION
#define ELASTEIG_VERSION "0.0.0"
#endif

namespace elasteig {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ostream& log_of(const CommandOptions& opts) { return opts.log ? *opts.log : std::cerr; }

// JSON has no NaN or infinity.
json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json header(const ExperimentConfig* cfg, const CommandOptions& opts) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["tool"] = "elasteig";
  j["version"] = ELASTEIG_VERSION;
  j["threads"] = opts.threads;
  if (cfg) {
    j["label"] = cfg->label;
    j["config"] = cfg->echo;
  }
  return j;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

ExperimentConfig prepare(const fs::path& config, const CommandOptions& opts) {
  if (opts.threads < 1) throw InputError("--threads must be >= 1");
  ExperimentConfig cfg = load_config(config);
  if (opts.out) cfg.output.directory = *opts.out;
  if (opts.seed) {
    cfg.eigen.seed = *opts.seed;
    cfg.echo["eigen"]["seed"] = *opts.seed;
  }
  std::error_code ec;
  fs::create_directories(cfg.output.directory, ec);
  if (ec) throw InputError("cannot create output directory " + cfg.output.directory.string());
  return cfg;
}

json mesh_info(const Mesh& mesh, const DofMap* dofs) {
  json j;
  j["vertices"] = mesh.num_vertices();
  j["cells"] = mesh.num_cells();
  j["h_max"] = mesh.max_diameter();
  j["min_angle_deg"] = mesh.min_angle() * 180.0 / M_PI;
  if (dofs) {
    j["displacement_dofs"] = dofs->num_free_displacement();
    j["pressure_dofs"] = dofs->num_pressure;
    j["unknowns"] = dofs->num_unknowns();
  }
  return j;
}

json diagnostics_json(const EigenDiagnostics& d) {
  return {{"restarts", d.restarts},
          {"operator_applications", d.operator_applications},
          {"krylov_dim", d.krylov_dim},
          {"discarded_spurious", d.discarded_spurious},
          {"factorization_seconds", d.factorization_seconds},
          {"solve_seconds", d.solve_seconds},
          {"seed", d.seed},
          {"backend", d.backend}};
}

SparseMatrix full_mass(const SaddleSystem& s) {
  SparseMatrix m(s.size(), s.size());
  std::vector<Eigen::Triplet<double>> t;
  for (int k = 0; k < s.M.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(s.M, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  }
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

template <class Body>
int guarded(const CommandOptions& opts, Body&& body) {
  try {
    return body();
  } catch (const InputError& e) {
    log_of(opts) << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SolverError& e) {
    log_of(opts) << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const nlohmann::json::exception& e) {
    log_of(opts) << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    log_of(opts) << "internal error: " << e.what() << '\n';
    return kExitSolver;
  }
}

json history_json(const ConvergenceHistory& h) {
  json j;
  j["modes"] = h.modes;
  j["references"] = json::array();
  for (const auto& r : h.references) {
    j["references"].push_back(
        {{"mode", r.mode}, {"kappa_hat", r.kappa_hat}, {"provenance", r.provenance}});
  }
  j["err_source"] = h.err_source;
  j["records"] = json::array();
  for (const auto& r : h.records) {
    json rec = {{"iteration", r.iteration}, {"dofs", r.dofs},        {"cells", r.cells},
                {"h_max", r.h_max},         {"eta", number(r.eta)},  {"theta", number(r.theta)},
                {"eff", number(r.eff)},     {"marked", r.marked},    {"seconds", r.seconds},
                {"max_residual", r.max_residual}};
    rec["kappa_hat"] = json::array();
    rec["err"] = json::array();
    rec["crossing"] = json::array();
    for (std::size_t i = 0; i < r.kappa_hat.size(); ++i) {
      rec["kappa_hat"].push_back(r.kappa_hat[i]);
      rec["err"].push_back(i < r.err.size() ? number(r.err[i]) : json(nullptr));
      rec["crossing"].push_back(i < r.crossing.size() && r.crossing[i] != 0);
    }
    j["records"].push_back(rec);
  }
  j["rates"] = json::array();
  for (int mode : h.modes) {
    json r = {{"mode", mode}};
    for (auto [axis, key] : {std::pair{RateAxis::H, "h"}, std::pair{RateAxis::Dofs, "dofs"}}) {
      try {
        const RateFit f = fit_rate(h, axis, mode);
        r[key] = {{"slope", f.slope}, {"points", f.points}, {"excluded", f.excluded}};
      } catch (const InputError&) {
        r[key] = nullptr;
      }
    }
    try {
      const Extrapolation e = extrapolate(h, mode);
      r["extrapolated_kappa_hat"] = e.value;
      r["extrapolation_order"] = e.order;
      r["extrapolation_fallback"] = e.fallback;
    } catch (const InputError&) {
      r["extrapolated_kappa_hat"] = nullptr;
    }
    j["rates"].push_back(r);
  }
  j["status"] = h.failure.empty() ? "ok" : "failed";
  if (!h.failure.empty()) j["error"] = h.failure;
  return j;
}

} // namespace

int cmd_solve(const fs::path& config, const CommandOptions& opts) {
  return guarded(opts, [&] {
    const ExperimentConfig cfg = prepare(config, opts);
    const fs::path dir = cfg.output.directory;
    const Mesh mesh = cfg.build_mesh();
    check_compatible(cfg.model, mesh);
    const EdgeTopology topo = build_edge_topology(mesh);
    const DofMap dofs = build_dof_map(mesh, topo, cfg.family);
    const SystemMatrices sys = assemble(mesh, dofs, cfg.model);
    const SaddleSystem saddle = SaddleSystem::from(sys, cfg.model.poisson);

    json doc = header(&cfg, opts);
    doc["mesh"] = mesh_info(mesh, &dofs);
    doc["element"] = to_string(cfg.family);

    if (cfg.output.matrices) {
      auto k = open_output(dir / "K.mtx");
      write_matrix_market(k, saddle.K);
      auto m = open_output(dir / "M.mtx");
      write_matrix_market(m, full_mass(saddle));
    }

    EigenResult eig;
    try {
      eig = solve_eigen(saddle, cfg.eigen);
    } catch (const SolverError& e) {
      doc["status"] = "failed";
      doc["error"] = e.what();
      doc["eigenvalues"] = json::array();
      write_json(dir / "eigenvalues.json", doc);
      throw;
    }

    doc["eigenvalues"] = json::array();
    for (std::size_t i = 0; i < eig.kappas.size(); ++i) {
      doc["eigenvalues"].push_back({{"mode", i + 1},
                                    {"kappa", eig.kappas[i]},
                                    {"kappa_hat", eig.kappa_hats[i]},
                                    {"sqrt_kappa_hat", std::sqrt(eig.kappa_hats[i])},
                                    {"residual", eig.residuals[i]}});
    }
    doc["diagnostics"] = diagnostics_json(eig.diagnostics);

    if (cfg.estimate) {
      const ProjectedCoefficients proj = project_coefficients(cfg.model, mesh);
      const EstimatorContext ctx(mesh, topo, dofs, cfg.model, proj);
      const int nd = dofs.num_free_displacement();
      const DiscretePair pair{eig.kappas[0], expand_displacement(dofs, eig.displacement(0, nd)),
                              eig.pressure(0, nd)};
      const ErrorIndicators ind = assemble_indicators(ctx, pair);
      doc["estimator"] = {{"mode", 1}, {"eta", ind.eta}, {"theta", ind.theta}};
      if (cfg.output.indicators) {
        auto out = open_output(dir / "indicators.csv");
        write_indicator_csv(out, ind);
      }
    }
    doc["status"] = "ok";
    write_json(dir / "eigenvalues.json", doc);

    auto& log = log_of(opts);
    for (std::size_t i = 0; i < eig.kappa_hats.size(); ++i) {
      log << "mode " << i + 1 << "  sqrt(kappa_hat) = " << format_fixed(std::sqrt(eig.kappa_hats[i]), 6)
          << '\n';
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_study(const fs::path& config, const CommandOptions& opts) {
  return guarded(opts, [&] {
    const ExperimentConfig cfg = prepare(config, opts);
    const fs::path dir = cfg.output.directory;
    const StudyConfig study = cfg.study_config();
    auto& log = log_of(opts);

    const ConvergenceHistory history =
        run_study(study, [&](const IterationRecord& r, const Mesh&) {
          log << "iteration " << r.iteration << ": dofs " << r.dofs << ", kappa_hat";
          for (double k : r.kappa_hat) log << ' ' << k;
          if (study.estimate) log << ", eta " << r.eta;
          log << " (" << format_fixed(r.seconds, 2) << " s)\n";
        });

    json doc = header(&cfg, opts);
    doc["element"] = to_string(cfg.family);
    doc["loop"] = to_string(cfg.loop);
    doc.update(history_json(history));
    write_json(dir / "history.json", doc);
    {
      auto out = open_output(dir / "history.csv");
      write_history_csv(out, history);
    }
    if (cfg.output.table && history.records.size() >= 4) {
      const ReportTable table = build_table({{cfg.label.empty() ? "study" : cfg.label, &history}});
      auto out = open_output(dir / "table.csv");
      write_table_csv(out, table);
    }
    if (cfg.output.plot && !history.empty()) {
      auto out = open_output(dir / "plot.csv");
      emit_plot_data(out, history, history.modes.front());
    }
    if (!history.failure.empty()) {
      log << "solver failure: " << history.failure << '\n';
      return static_cast<int>(kExitSolver);
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_verify(const CommandOptions& opts, const std::string& inject_fault) {
  return guarded(opts, [&] {
    if (opts.threads < 1) throw InputError("--threads must be >= 1");
    const auto results = run_verify(inject_fault);
    auto& log = log_of(opts);
    bool ok = true;
    json doc = header(nullptr, opts);
    doc["inject_fault"] = inject_fault;
    doc["checks"] = json::array();
    for (const auto& r : results) {
      log << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
      doc["checks"].push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
      ok = ok && r.passed;
    }
    doc["status"] = ok ? "ok" : "failed";
    if (opts.out) {
      fs::create_directories(*opts.out);
      write_json(*opts.out / "verify.json", doc);
    }
    return static_cast<int>(ok ? kExitOk : kExitVerify);
  });
}

} // namespace elasteig
