#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "elasteig/fem.hpp"

namespace elasteig {

/// Symmetric indefinite pencil (K, Mhat) with
///   K    = [[A, B^T], [B, -C]],   Mhat = [[M, 0], [0, 0]]
/// over the free displacement dofs followed by the pressure dofs.
struct SaddleSystem {
  SparseMatrix K;
  SparseMatrix M;  // displacement block of Mhat
  int num_displacement = 0;
  int num_pressure = 0;
  double poisson = 0.0;  // only used to report unscaled eigenvalues

  static SaddleSystem from(const SystemMatrices& m, double poisson);

  [[nodiscard]] int size() const { return num_displacement + num_pressure; }
  /// Mhat * x.
  [[nodiscard]] Vector apply_mass(const Vector& x) const;
  /// x^T Mhat y.
  [[nodiscard]] double mass_inner(const Vector& x, const Vector& y) const;
};

/// Sparse LU of K - shift * Mhat, factored once and reused.
class ShiftInvertOperator {
public:
  ShiftInvertOperator(const SaddleSystem& system, double shift);
  ~ShiftInvertOperator();
  ShiftInvertOperator(const ShiftInvertOperator&) = delete;
  ShiftInvertOperator& operator=(const ShiftInvertOperator&) = delete;

  /// Solves (K - shift Mhat) y = rhs.
  [[nodiscard]] Vector solve(const Vector& rhs) const;
  /// y = (K - shift Mhat)^{-1} Mhat x.
  [[nodiscard]] Vector apply(const Vector& x) const;

  [[nodiscard]] double factorization_seconds() const { return seconds_; }
  [[nodiscard]] const char* backend() const;

private:
  struct Impl;
  const SaddleSystem& system_;
  std::unique_ptr<Impl> impl_;
  double seconds_ = 0.0;
};

struct EigenOptions {
  int k = 6;
  double shift = 0.0;
  double tol = 1e-8;
  int max_iter = 300;  // restart cycles
  std::uint64_t seed = 20240607;
  int buffer = 4;       // extra Ritz pairs computed beyond k
  int krylov_dim = 0;   // 0 selects max(2*(k+buffer)+10, 24)
};

struct EigenDiagnostics {
  int restarts = 0;
  int operator_applications = 0;
  int krylov_dim = 0;
  int discarded_spurious = 0;
  double factorization_seconds = 0.0;
  double solve_seconds = 0.0;
  std::uint64_t seed = 0;
  std::string backend;
};

struct EigenResult {
  std::vector<double> kappas;     // ascending scaled eigenvalues
  std::vector<double> kappa_hats;  // kappas / (1 + nu)
  std::vector<Vector> vectors;     // (u, p) on the reduced system, Mhat-normalized
  std::vector<double> residuals;   // ||K x - kappa Mhat x|| / ||K x||
  EigenDiagnostics diagnostics;

  [[nodiscard]] Vector displacement(int i, int num_displacement) const {
    return vectors[i].head(num_displacement);
  }
  [[nodiscard]] Vector pressure(int i, int num_displacement) const {
    return vectors[i].tail(vectors[i].size() - num_displacement);
  }
};

/// The k smallest eigenvalues of K x = kappa Mhat x by shift-invert Krylov
/// iteration with full Mhat-orthogonalization and thick restarts.
/// Throws SolverError on factorization failure or non-convergence.
EigenResult solve_eigen(const SaddleSystem& system, const EigenOptions& opts = {});

struct SourceSolution {
  Vector u;
  Vector p;
  double relative_residual = 0.0;
};

/// Solves K (u, p) = (M f, 0).
SourceSolution solve_source(const SaddleSystem& system, const Vector& f);

/// (x^T K x) / (x^T Mhat x); throws InputError for zero Mhat-norm.
double rayleigh_quotient(const SaddleSystem& system, const Vector& x);

} // namespace elasteig
