#include "elasteig/adaptive.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "elasteig/error.hpp"

namespace elasteig {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kTrackingWindow = 0.2;

} // namespace

std::vector<int> mark(const ErrorIndicators& indicators, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw InputError("marking fraction must lie in (0, 1]");
  }
  const int n = indicators.size();
  std::vector<double> eta(n);
  double top = 0.0;
  for (int c = 0; c < n; ++c) {
    eta[c] = std::sqrt(indicators.marking_indicator_sq(c));
    top = std::max(top, eta[c]);
  }
  std::vector<int> marked;
  const double threshold = fraction * top;
  for (int c = 0; c < n; ++c) {
    if (eta[c] >= threshold) marked.push_back(c);
  }
  return marked;
}

std::string to_string(LoopKind kind) { return kind == LoopKind::Uniform ? "uniform" : "adaptive"; }

LoopKind loop_kind_from_string(const std::string& name) {
  if (name == "uniform") return LoopKind::Uniform;
  if (name == "adaptive") return LoopKind::Adaptive;
  throw InputError("unknown loop kind '" + name + "' (expected uniform or adaptive)");
}

void StudyConfig::check() const {
  if (modes.empty()) throw InputError("at least one mode must be tracked");
  for (int m : modes) {
    if (m < 1) throw InputError("mode indices are 1-based");
  }
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw InputError("marking fraction must lie in (0, 1]");
  }
  if (max_iterations < 1) throw InputError("max_iterations must be >= 1");
  if (max_dofs < 1) throw InputError("max_dofs must be >= 1");
  if (loop == LoopKind::Adaptive && !meshes.empty()) {
    throw InputError("adaptive studies start from a single initial mesh");
  }
  if (meshes.empty() && initial_mesh.cells.empty()) throw InputError("study has no mesh");
  for (const auto& r : references) {
    if (r.provenance.empty()) {
      throw InputError("reference value for mode " + std::to_string(r.mode) +
                       " lacks a provenance label");
    }
    if (!(r.kappa_hat > 0.0)) throw InputError("reference eigenvalues must be positive");
    if (std::find(modes.begin(), modes.end(), r.mode) == modes.end()) {
      throw InputError("reference value for mode " + std::to_string(r.mode) + ", which is not tracked");
    }
  }
  model.check();
}

int ConvergenceHistory::mode_position(int mode) const {
  const auto it = std::find(modes.begin(), modes.end(), mode);
  if (it == modes.end()) throw InputError("mode " + std::to_string(mode) + " is not tracked");
  return static_cast<int>(it - modes.begin());
}

std::vector<double> ConvergenceHistory::values(int mode) const {
  const int k = mode_position(mode);
  std::vector<double> v;
  for (const auto& r : records) v.push_back(r.kappa_hat[k]);
  return v;
}

std::vector<double> ConvergenceHistory::errors(int mode) const {
  const int k = mode_position(mode);
  std::vector<double> v;
  for (const auto& r : records) v.push_back(r.err.empty() ? kNaN : r.err[k]);
  return v;
}

std::vector<double> ConvergenceHistory::h_values() const {
  std::vector<double> v;
  for (const auto& r : records) v.push_back(r.h_max);
  return v;
}

std::vector<double> ConvergenceHistory::dof_values() const {
  std::vector<double> v;
  for (const auto& r : records) v.push_back(static_cast<double>(r.dofs));
  return v;
}

std::vector<std::pair<int, int>> cluster_eigenvalues(const std::vector<double>& sorted,
                                                     double rel_tol) {
  std::vector<std::pair<int, int>> out;
  const int n = static_cast<int>(sorted.size());
  int first = 0;
  for (int i = 1; i <= n; ++i) {
    if (i == n || std::abs(sorted[i] - sorted[i - 1]) > rel_tol * std::abs(sorted[i])) {
      out.emplace_back(first, i);
      first = i;
    }
  }
  return out;
}

namespace {

struct Tracked {
  std::vector<double> values;
  std::vector<char> crossing;
  int estimator_vector = 0;  // eigenvector index of the first tracked mode
};

Tracked track_modes(const std::vector<int>& modes, const std::vector<double>& kappa_hat,
                    const std::vector<double>* previous) {
  const auto clusters = cluster_eigenvalues(kappa_hat);
  std::vector<double> means;
  for (auto [a, b] : clusters) {
    double s = 0.0;
    for (int i = a; i < b; ++i) s += kappa_hat[i];
    means.push_back(s / (b - a));
  }
  auto cluster_of_index = [&](int idx) {
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      if (idx >= clusters[c].first && idx < clusters[c].second) return static_cast<int>(c);
    }
    throw SolverError("tracked mode beyond the computed spectrum");
  };
  const std::size_t nm = modes.size();
  std::vector<int> chosen(nm);
  for (std::size_t k = 0; k < nm; ++k) chosen[k] = cluster_of_index(modes[k] - 1);
  std::vector<char> crossed(nm, 0);
  if (previous != nullptr && means.size() >= nm) {
    // One-to-one, order-preserving assignment of tracked values to clusters
    // with minimal total distance (optimal for sorted sequences).
    std::vector<std::size_t> order(nm);
    for (std::size_t k = 0; k < nm; ++k) order[k] = k;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return (*previous)[a] < (*previous)[b]; });
    const std::size_t nc = means.size();
    const double inf = std::numeric_limits<double>::infinity();
    // cost[i][j]: best total for the first i tracked values using clusters < j.
    std::vector<std::vector<double>> cost(nm + 1, std::vector<double>(nc + 1, inf));
    std::vector<std::vector<char>> take(nm + 1, std::vector<char>(nc + 1, 0));
    for (std::size_t j = 0; j <= nc; ++j) cost[0][j] = 0.0;
    for (std::size_t i = 1; i <= nm; ++i) {
      const double prev = (*previous)[order[i - 1]];
      for (std::size_t j = 1; j <= nc; ++j) {
        cost[i][j] = cost[i][j - 1];
        const double c = cost[i - 1][j - 1] + std::abs(means[j - 1] - prev) / std::abs(prev);
        if (c < cost[i][j]) {
          cost[i][j] = c;
          take[i][j] = 1;
        }
      }
    }
    std::size_t i = nm;
    std::size_t j = nc;
    while (i > 0) {
      if (take[i][j]) {
        const std::size_t k = order[i - 1];
        const double prev = (*previous)[k];
        if (std::abs(means[j - 1] - prev) <= kTrackingWindow * std::abs(prev)) {
          chosen[k] = static_cast<int>(j - 1);
        } else {
          crossed[k] = 1;
        }
        --i;
      }
      --j;
    }
  }
  Tracked t;
  for (std::size_t k = 0; k < nm; ++k) {
    t.values.push_back(means[chosen[k]]);
    t.crossing.push_back(crossed[k]);
  }
  t.estimator_vector = clusters[chosen[0]].first;
  return t;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void fill_errors(ConvergenceHistory& h) {
  const std::size_t nm = h.modes.size();
  h.err_source.assign(nm, "none");
  for (auto& r : h.records) r.err.assign(nm, kNaN);
  for (std::size_t k = 0; k < nm; ++k) {
    const int mode = h.modes[k];
    std::optional<double> target;
    for (const auto& ref : h.references) {
      if (ref.mode == mode) target = ref.kappa_hat;
    }
    if (target) {
      h.err_source[k] = "reference";
    } else if (h.records.size() >= 3) {
      target = extrapolate(h.h_values(), h.values(mode)).value;
      h.err_source[k] = "extrapolation";
    }
    if (!target) continue;
    for (auto& r : h.records) r.err[k] = std::abs(r.kappa_hat[k] - *target);
  }
  for (auto& r : h.records) {
    r.eff = (r.eta > 0.0 && !std::isnan(r.err[0])) ? effectivity(r.err[0], r.eta) : kNaN;
  }
}

} // namespace

ConvergenceHistory run_study(const StudyConfig& config, const IterationObserver& observer) {
  config.check();
  ConvergenceHistory history;
  history.modes = config.modes;
  history.references = config.references;

  const int max_mode = *std::max_element(config.modes.begin(), config.modes.end());
  EigenOptions eopts = config.eigen;
  eopts.k = std::max(eopts.k, max_mode + 1);

  const bool explicit_levels = !config.meshes.empty();
  const int iterations = explicit_levels
                             ? std::min<int>(config.max_iterations, config.meshes.size())
                             : config.max_iterations;
  Mesh mesh = explicit_levels ? config.meshes.front() : config.initial_mesh;
  const std::vector<double>* previous = nullptr;

  for (int it = 0; it < iterations; ++it) {
    const auto t0 = std::chrono::steady_clock::now();
    if (explicit_levels) mesh = config.meshes[it];
    check_compatible(config.model, mesh);
    const EdgeTopology topo = build_edge_topology(mesh);
    const DofMap dofs = build_dof_map(mesh, topo, config.family);
    if (dofs.num_unknowns() > config.max_dofs && !history.records.empty()) break;

    IterationRecord rec;
    rec.iteration = it;
    rec.dofs = dofs.num_unknowns();
    rec.cells = mesh.num_cells();
    rec.h_max = mesh.max_diameter();

    EigenResult eig;
    try {
      const SystemMatrices sys = assemble(mesh, dofs, config.model);
      const SaddleSystem saddle = SaddleSystem::from(sys, config.model.poisson);
      eig = solve_eigen(saddle, eopts);
    } catch (const SolverError& e) {
      history.failure = "iteration " + std::to_string(it) + ": " + e.what();
      break;
    }
    for (double r : eig.residuals) rec.max_residual = std::max(rec.max_residual, r);

    const Tracked tracked = track_modes(config.modes, eig.kappa_hats, previous);
    rec.kappa_hat = tracked.values;
    rec.crossing = tracked.crossing;

    std::vector<int> marked;
    if (config.estimate || config.loop == LoopKind::Adaptive) {
      const ProjectedCoefficients proj = project_coefficients(config.model, mesh);
      const EstimatorContext ctx(mesh, topo, dofs, config.model, proj);
      const int i = tracked.estimator_vector;
      const int nd = dofs.num_free_displacement();
      const DiscretePair pair{eig.kappas[i], expand_displacement(dofs, eig.displacement(i, nd)),
                              eig.pressure(i, nd)};
      const ErrorIndicators ind = assemble_indicators(ctx, pair);
      rec.eta = ind.eta;
      rec.theta = ind.theta;
      if (config.loop == LoopKind::Adaptive) marked = mark(ind, config.fraction);
    }
    rec.marked = static_cast<int>(marked.size());
    rec.seconds = seconds_since(t0);
    history.records.push_back(rec);
    previous = &history.records.back().kappa_hat;
    if (observer) observer(history.records.back(), mesh);

    if (!explicit_levels && it + 1 < iterations) {
      mesh = config.loop == LoopKind::Adaptive ? refine(mesh, marked).mesh
                                               : refine_uniform(mesh).mesh;
    }
  }
  fill_errors(history);
  return history;
}

RateFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InputError("rate fit: x and y differ in length");
  std::vector<double> lx, ly;
  RateFit fit;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > 0.0) || !(x[i] > 0.0)) {
      ++fit.excluded;
      continue;
    }
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  if (lx.size() < 3) throw InputError("rate fit needs at least three positive data points");
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (!(sxx > 0.0)) throw InputError("rate fit: abscissae are all equal");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.points = static_cast<int>(lx.size());
  return fit;
}

RateFit fit_rate(const ConvergenceHistory& history, RateAxis axis, int mode) {
  const auto x = axis == RateAxis::H ? history.h_values() : history.dof_values();
  return fit_power_law(x, history.errors(mode));
}

namespace {

struct LinearFit {
  double a = 0.0;  // limit
  double c = 0.0;
  double residual = 0.0;
};

LinearFit fit_fixed_order(const std::vector<double>& h, const std::vector<double>& v, double t) {
  const int n = static_cast<int>(h.size());
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = std::pow(h[i], t);
    b[i] = v[i];
  }
  const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(b);
  LinearFit f;
  f.a = coef[0];
  f.c = coef[1];
  f.residual = (A * coef - b).norm();
  return f;
}

} // namespace

Extrapolation extrapolate(const std::vector<double>& h, const std::vector<double>& values) {
  if (h.size() != values.size()) throw InputError("extrapolation: h and values differ in length");
  if (h.size() < 3) throw InputError("extrapolation needs at least three levels");
  Extrapolation out;
  int sign = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double d = values[i] - values[i - 1];
    const int s = (d > 0) - (d < 0);
    if (sign != 0 && s != 0 && s != sign) out.monotone = false;
    if (s != 0) sign = s;
  }

  constexpr double t_lo = 0.1;
  constexpr double t_hi = 8.0;
  auto residual = [&](double t) { return fit_fixed_order(h, values, t).residual; };
  // Coarse scan followed by golden-section refinement of the best bracket.
  constexpr int samples = 160;
  int best = 0;
  double best_r = std::numeric_limits<double>::infinity();
  std::vector<double> grid(samples + 1);
  for (int i = 0; i <= samples; ++i) {
    grid[i] = t_lo * std::pow(t_hi / t_lo, static_cast<double>(i) / samples);
    const double r = residual(grid[i]);
    if (r < best_r) {
      best_r = r;
      best = i;
    }
  }
  const bool interior = best > 0 && best < samples;
  if (interior) {
    double a = grid[best - 1];
    double b = grid[best + 1];
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - g * (b - a);
    double x2 = a + g * (b - a);
    double f1 = residual(x1);
    double f2 = residual(x2);
    for (int k = 0; k < 200 && b - a > 1e-13; ++k) {
      if (f1 < f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - g * (b - a);
        f1 = residual(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + g * (b - a);
        f2 = residual(x2);
      }
    }
    out.order = 0.5 * (a + b);
    const LinearFit f = fit_fixed_order(h, values, out.order);
    out.value = f.a;
    if (std::isfinite(out.value) && f.c != 0.0) return out;
  }

  // Fallback: order from the decay of successive differences.
  std::vector<double> hm, dv;
  for (std::size_t i = 1; i < values.size(); ++i) {
    hm.push_back(std::sqrt(h[i] * h[i - 1]));
    dv.push_back(std::abs(values[i] - values[i - 1]));
  }
  out.fallback = true;
  if (hm.size() >= 3) {
    out.order = fit_power_law(hm, dv).slope;
  } else {
    const double t = std::log(dv[1] / dv[0]) / std::log(hm[1] / hm[0]);
    out.order = std::isfinite(t) ? t : 1.0;
  }
  out.value = fit_fixed_order(h, values, out.order).a;
  return out;
}

Extrapolation extrapolate(const ConvergenceHistory& history, int mode) {
  return extrapolate(history.h_values(), history.values(mode));
}

} // namespace elasteig
