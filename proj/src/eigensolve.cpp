#include "elasteig/eigensolve.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#ifdef ELASTEIG_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

#include "elasteig/error.hpp"

namespace elasteig {

namespace {

// Relative Mhat-norm below which a new Krylov direction is treated as lying
// in the span of the previous ones.
constexpr double kBreakdown = 1e-6;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

} // namespace

SaddleSystem SaddleSystem::from(const SystemMatrices& m, double poisson) {
  SaddleSystem s;
  s.num_displacement = m.num_free_displacement;
  s.num_pressure = m.num_pressure;
  s.poisson = poisson;
  s.M = m.M;
  const int nu = s.num_displacement;
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(m.A.nonZeros() + 2 * m.B.nonZeros() + m.C.nonZeros());
  for (int k = 0; k < m.A.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m.A, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  }
  for (int k = 0; k < m.B.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m.B, k); it; ++it) {
      t.emplace_back(nu + it.row(), it.col(), it.value());
      t.emplace_back(it.col(), nu + it.row(), it.value());
    }
  }
  for (int k = 0; k < m.C.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m.C, k); it; ++it) {
      t.emplace_back(nu + it.row(), nu + it.col(), -it.value());
    }
  }
  s.K.resize(s.size(), s.size());
  s.K.setFromTriplets(t.begin(), t.end());
  return s;
}

Vector SaddleSystem::apply_mass(const Vector& x) const {
  Vector y = Vector::Zero(size());
  y.head(num_displacement) = M * x.head(num_displacement);
  return y;
}

double SaddleSystem::mass_inner(const Vector& x, const Vector& y) const {
  return x.head(num_displacement).dot(M * y.head(num_displacement));
}

struct ShiftInvertOperator::Impl {
  SparseMatrix op;  // the factorization keeps a reference to it
#ifdef ELASTEIG_HAVE_UMFPACK
  Eigen::UmfPackLU<SparseMatrix> lu;
  static constexpr const char* name = "umfpack";
#else
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  static constexpr const char* name = "eigen-sparselu";
#endif
};

ShiftInvertOperator::ShiftInvertOperator(const SaddleSystem& system, double shift)
    : system_(system), impl_(std::make_unique<Impl>()) {
  const auto t0 = Clock::now();
  SparseMatrix op = system.K;
  if (shift != 0.0) {
    SparseMatrix mhat(system.size(), system.size());
    std::vector<Eigen::Triplet<double>> t;
    for (int k = 0; k < system.M.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(system.M, k); it; ++it) {
        t.emplace_back(it.row(), it.col(), it.value());
      }
    }
    mhat.setFromTriplets(t.begin(), t.end());
    op = system.K - shift * mhat;
  }
  op.makeCompressed();
  impl_->op = std::move(op);
  impl_->lu.compute(impl_->op);
  if (impl_->lu.info() != Eigen::Success) {
    throw SolverError("factorization failure: K - shift*Mhat is singular or ill-posed (shift = " +
                      std::to_string(shift) + ")");
  }
  seconds_ = seconds_since(t0);
}

ShiftInvertOperator::~ShiftInvertOperator() = default;

const char* ShiftInvertOperator::backend() const { return Impl::name; }

Vector ShiftInvertOperator::solve(const Vector& rhs) const {
  Vector y = impl_->lu.solve(rhs);
  if (impl_->lu.info() != Eigen::Success || !y.allFinite()) {
    throw SolverError("triangular solve failed");
  }
  return y;
}

Vector ShiftInvertOperator::apply(const Vector& x) const { return solve(system_.apply_mass(x)); }

EigenResult solve_eigen(const SaddleSystem& system, const EigenOptions& opts) {
  if (opts.k < 1) throw InputError("number of requested eigenvalues must be >= 1");
  const auto t0 = Clock::now();
  const int n = system.size();
  const int nu = system.num_displacement;
  int nev = std::min(opts.k + std::max(0, opts.buffer), nu);
  if (opts.k > nu) throw InputError("more eigenvalues requested than displacement dofs");
  int m = opts.krylov_dim > 0 ? opts.krylov_dim : std::max(2 * nev + 10, 24);
  m = std::min(m, nu);

  ShiftInvertOperator op(system, opts.shift);
  EigenResult result;
  result.diagnostics.seed = opts.seed;
  result.diagnostics.krylov_dim = m;
  result.diagnostics.factorization_seconds = op.factorization_seconds();
  result.diagnostics.backend = op.backend();

  auto inner = [&](const Vector& x, const Vector& y) { return system.mass_inner(x, y); };
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  auto random_vector = [&]() {
    Vector r(n);
    for (int i = 0; i < n; ++i) r[i] = uni(rng);
    return r;
  };

  Eigen::MatrixXd V(n, m + 1);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);

  // Orthogonalizes w against V(:, 0..j) twice (classical Gram-Schmidt with
  // one reorthogonalization pass); returns the accumulated coefficients.
  auto orthogonalize = [&](Vector& w, int j) {
    Eigen::VectorXd h = Eigen::VectorXd::Zero(j + 1);
    for (int pass = 0; pass < 2; ++pass) {
      const Vector mw = system.M * w.head(nu);
      Eigen::VectorXd c = V.leftCols(j + 1).topRows(nu).transpose() * mw;
      w -= V.leftCols(j + 1) * c;
      h += c;
    }
    return h;
  };

  // Start in the range of the operator so the pressure part is consistent.
  {
    Vector v0 = op.apply(random_vector());
    ++result.diagnostics.operator_applications;
    const double nrm = std::sqrt(inner(v0, v0));
    if (!(nrm > 0.0)) throw SolverError("degenerate starting vector");
    V.col(0) = v0 / nrm;
  }

  int kept = 0;  // leading columns of V/H already set by a thick restart
  Eigen::VectorXd theta;
  Eigen::MatrixXd Y;
  bool converged = false;
  const double inner_tol = std::min(opts.tol, 1e-8) * 1e-2;

  int dim = m;  // shrinks when the Krylov space exhausts the finite spectrum
  for (int cycle = 0; cycle <= opts.max_iter; ++cycle) {
    bool exhausted = false;
    for (int j = kept; j < m; ++j) {
      Vector w = op.apply(V.col(j));
      ++result.diagnostics.operator_applications;
      const double w_norm = std::sqrt(std::max(0.0, inner(w, w)));
      const Eigen::VectorXd h = orthogonalize(w, j);
      H.col(j).head(j + 1) = h;
      double beta = std::sqrt(std::max(0.0, inner(w, w)));
      if (beta <= kBreakdown * w_norm || beta == 0.0) {
        if (j + 1 < m) {
          // Invariant subspace: continue with a fresh direction if one exists.
          w = op.apply(random_vector());
          ++result.diagnostics.operator_applications;
          const double nrm0 = std::sqrt(inner(w, w));
          orthogonalize(w, j);
          const double nrm = std::sqrt(inner(w, w));
          if (nrm > kBreakdown * nrm0) {
            V.col(j + 1) = w / nrm;
            H(j + 1, j) = 0.0;
            continue;
          }
        }
        dim = j + 1;
        exhausted = true;
        break;
      }
      V.col(j + 1) = w / beta;
      H(j + 1, j) = beta;
    }
    if (exhausted && dim < opts.k) {
      throw SolverError("the discrete problem has only " + std::to_string(dim) +
                        " finite eigenvalues");
    }
    nev = std::min(nev, dim);

    const Eigen::MatrixXd Hm = H.topLeftCorner(dim, dim);
    const Eigen::MatrixXd Hs = 0.5 * (Hm + Hm.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hs);
    // Largest theta first (smallest kappa - shift > 0).
    theta = es.eigenvalues().reverse();
    Y = es.eigenvectors().rowwise().reverse();
    const double beta = exhausted ? 0.0 : H(m, m - 1);

    int nconv = 0;
    for (int i = 0; i < nev; ++i) {
      const double res = std::abs(beta * Y(dim - 1, i));
      if (res <= inner_tol * std::abs(theta[i])) ++nconv;
      else break;
    }
    if (nconv >= nev) {
      converged = true;
      result.diagnostics.restarts = cycle;
      break;
    }
    if (cycle == opts.max_iter) {
      result.diagnostics.restarts = cycle;
      break;
    }

    // Thick restart: keep p Ritz vectors plus the residual direction.
    const int p = std::min(m - 2, nev + std::max(1, (m - nev) / 3) + nconv / 2);
    const Eigen::MatrixXd Vp = V.leftCols(m) * Y.leftCols(p);
    V.leftCols(p) = Vp;
    V.col(p) = V.col(m);
    H.setZero();
    for (int i = 0; i < p; ++i) {
      H(i, i) = theta[i];
      H(p, i) = beta * Y(m - 1, i);
    }
    kept = p;
  }
  if (!converged) {
    throw SolverError("eigensolver did not converge within " + std::to_string(opts.max_iter) +
                      " restarts");
  }

  // Ritz vectors, Mhat-normalized, with explicit residuals.
  struct Pair {
    double kappa;
    Vector x;
    double residual;
  };
  std::vector<Pair> pairs;
  const double mass_scale = std::sqrt(system.M.diagonal().maxCoeff());
  for (int i = 0; i < nev; ++i) {
    // One extra application purges components outside the operator range.
    Vector x = op.apply(V.leftCols(dim) * Y.col(i));
    ++result.diagnostics.operator_applications;
    const double mnorm = std::sqrt(std::max(0.0, inner(x, x)));
    if (!(mnorm > 1e-8 * mass_scale * x.head(nu).norm())) {
      ++result.diagnostics.discarded_spurious;
      continue;
    }
    x /= mnorm;
    Eigen::Index imax = 0;
    x.head(nu).cwiseAbs().maxCoeff(&imax);
    if (x[imax] < 0) x = -x;
    const Vector kx = system.K * x;
    const double kappa = x.dot(kx);
    const double res = (kx - kappa * system.apply_mass(x)).norm() / kx.norm();
    pairs.push_back({kappa, std::move(x), res});
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const Pair& a, const Pair& b) { return a.kappa < b.kappa; });
  if (static_cast<int>(pairs.size()) < opts.k) {
    throw SolverError("fewer non-spurious eigenpairs than requested");
  }
  for (int i = 0; i < opts.k; ++i) {
    if (!(pairs[i].kappa > 0.0)) throw SolverError("non-positive eigenvalue encountered");
    if (pairs[i].residual > opts.tol) {
      throw SolverError("eigenpair " + std::to_string(i) + " residual " +
                        std::to_string(pairs[i].residual) + " exceeds tolerance");
    }
    result.kappas.push_back(pairs[i].kappa);
    result.kappa_hats.push_back(pairs[i].kappa / (1.0 + system.poisson));
    result.residuals.push_back(pairs[i].residual);
    result.vectors.push_back(std::move(pairs[i].x));
  }
  result.diagnostics.solve_seconds = seconds_since(t0);
  return result;
}

SourceSolution solve_source(const SaddleSystem& system, const Vector& f) {
  if (f.size() != system.num_displacement || !f.allFinite()) {
    throw InputError("load vector must be finite with one entry per free displacement dof");
  }
  ShiftInvertOperator op(system, 0.0);
  Vector rhs = Vector::Zero(system.size());
  rhs.head(system.num_displacement) = system.M * f;
  const Vector x = op.solve(rhs);
  SourceSolution s;
  s.u = x.head(system.num_displacement);
  s.p = x.tail(system.num_pressure);
  const double rn = rhs.norm();
  s.relative_residual = rn > 0.0 ? (system.K * x - rhs).norm() / rn : (system.K * x).norm();
  return s;
}

double rayleigh_quotient(const SaddleSystem& system, const Vector& x) {
  const double den = system.mass_inner(x, x);
  if (!(den > 0.0)) throw InputError("rayleigh quotient of a vector with zero Mhat-norm");
  return x.dot(system.K * x) / den;
}

} // namespace elasteig
