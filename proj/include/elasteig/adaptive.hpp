#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "elasteig/coefficients.hpp"
#include "elasteig/eigensolve.hpp"
#include "elasteig/estimator.hpp"
#include "elasteig/fem.hpp"
#include "elasteig/mesh.hpp"

namespace elasteig {

/// Cells whose eta_T = sqrt(marking indicator) reaches `fraction` times the
/// largest eta_T. Never empty for a nonempty indicator set.
std::vector<int> mark(const ErrorIndicators& indicators, double fraction);

enum class LoopKind { Uniform, Adaptive };

std::string to_string(LoopKind kind);
LoopKind loop_kind_from_string(const std::string& name);

struct ReferenceValue {
  int mode = 1;          // 1-based
  double kappa_hat = 0;  // unscaled eigenvalue
  std::string provenance;
};

struct StudyConfig {
  /// Uniform studies over explicit meshes (e.g. structured n = 20, 30, ...).
  /// When empty, the study starts from `initial_mesh` and refines it.
  std::vector<Mesh> meshes;
  Mesh initial_mesh;
  MaterialModel model;
  ElementFamily family = ElementFamily::TaylorHood;
  std::vector<int> modes = {1};  // 1-based, the first one drives the estimator
  std::vector<ReferenceValue> references;
  LoopKind loop = LoopKind::Uniform;
  double fraction = 0.5;
  int max_iterations = 12;
  long max_dofs = 300000;
  bool estimate = true;
  EigenOptions eigen;

  /// Throws InputError on an invalid combination.
  void check() const;
};

struct IterationRecord {
  int iteration = 0;
  long dofs = 0;
  int cells = 0;
  double h_max = 0.0;
  std::vector<double> kappa_hat;  // one per tracked mode (cluster mean)
  std::vector<char> crossing;     // tracking fell back to the sorted index
  std::vector<double> err;        // filled after the loop; NaN when unknown
  double eta = 0.0;
  double theta = 0.0;
  double eff = 0.0;  // err of the first mode over eta^2; NaN when unknown
  int marked = 0;
  double seconds = 0.0;
  double max_residual = 0.0;
};

struct ConvergenceHistory {
  std::vector<int> modes;
  std::vector<ReferenceValue> references;
  std::vector<std::string> err_source;  // per mode: "reference", "extrapolation" or "none"
  std::vector<IterationRecord> records;
  std::string failure;  // non-empty when the loop aborted early

  [[nodiscard]] bool empty() const { return records.empty(); }
  [[nodiscard]] int mode_position(int mode) const;
  [[nodiscard]] std::vector<double> values(int mode) const;     // kappa_hat per record
  [[nodiscard]] std::vector<double> errors(int mode) const;     // err per record
  [[nodiscard]] std::vector<double> h_values() const;
  [[nodiscard]] std::vector<double> dof_values() const;
};

/// Called after every completed iteration.
using IterationObserver = std::function<void(const IterationRecord&, const Mesh&)>;

/// Solve, estimate and mark/refine until the stopping rule fires. An
/// eigensolver failure ends the loop and is reported in `failure` with the
/// records computed so far.
ConvergenceHistory run_study(const StudyConfig& config, const IterationObserver& observer = {});

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  int points = 0;
  int excluded = 0;  // non-positive errors skipped
};

/// Least-squares slope of log(y) against log(x); needs three positive y.
RateFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

enum class RateAxis { H, Dofs };

/// Slope of log(err) for `mode` against log(h) or log(dofs).
RateFit fit_rate(const ConvergenceHistory& history, RateAxis axis, int mode);

struct Extrapolation {
  double value = 0.0;
  double order = 0.0;
  bool fallback = false;
  bool monotone = true;
};

/// Least-squares fit of values ~ value_inf + C h^t over all given levels
/// (at least three), minimizing over t by variable projection.
Extrapolation extrapolate(const std::vector<double>& h, const std::vector<double>& values);

Extrapolation extrapolate(const ConvergenceHistory& history, int mode);

/// Groups sorted values into clusters closer than `rel_tol` (relative).
/// Returns the index ranges [first, last).
std::vector<std::pair<int, int>> cluster_eigenvalues(const std::vector<double>& sorted,
                                                     double rel_tol = 1e-6);

} // namespace elasteig
