#pragma once

// Test-side reference computations that share no code with the library.

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace oracle {

struct Gauss {
  std::vector<double> x, w;  // on [0, 1]
};

/// n-point Gauss-Legendre by Newton iteration on P_n.
inline Gauss gauss_legendre(int n) {
  Gauss g;
  for (int i = 0; i < n; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    g.x.push_back(0.5 * (1.0 - z));
    g.w.push_back(1.0 / ((1.0 - z * z) * dp * dp));
  }
  return g;
}

/// Conical-product (Duffy) rule: integral of f over the triangle abc.
inline double integrate_triangle(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                                 const Eigen::Vector2d& c,
                                 const std::function<double(const Eigen::Vector2d&)>& f,
                                 int n = 12) {
  const Gauss g = gauss_legendre(n);
  const double jac = std::abs((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double u = g.x[i];
      const double v = g.x[j] * (1.0 - u);
      s += g.w[i] * g.w[j] * (1.0 - u) * f(a + u * (b - a) + v * (c - a));
    }
  }
  return s * jac;
}

inline double integrate_segment(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                                const std::function<double(const Eigen::Vector2d&)>& f,
                                int n = 12) {
  const Gauss g = gauss_legendre(n);
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += g.w[i] * f(a + g.x[i] * (b - a));
  return s * (b - a).norm();
}

/// Finite eigenvalues of [[A, B^T], [B, -C]] x = kappa diag(M, 0) x, computed
/// by projecting onto the kernel of B when C = 0 and by a dense Schur
/// complement otherwise.
inline std::vector<double> saddle_eigenvalues(const Eigen::SparseMatrix<double>& As,
                                              const Eigen::SparseMatrix<double>& Bs,
                                              const Eigen::SparseMatrix<double>& Cs,
                                              const Eigen::SparseMatrix<double>& Ms) {
  const Eigen::MatrixXd A(As), B(Bs), C(Cs), M(Ms);
  Eigen::MatrixXd K, Mr;
  if (C.norm() == 0.0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeFullV);
    const double tol = 1e-10 * svd.singularValues()(0);
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i) rank += svd.singularValues()(i) > tol;
    const Eigen::MatrixXd Z = svd.matrixV().rightCols(B.cols() - rank);
    K = Z.transpose() * A * Z;
    Mr = Z.transpose() * M * Z;
  } else {
    K = A + B.transpose() * C.ldlt().solve(B);
    Mr = M;
  }
  K = 0.5 * (K + K.transpose()).eval();
  Mr = 0.5 * (Mr + Mr.transpose()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, Mr);
  const Eigen::VectorXd v = es.eigenvalues();
  return {v.data(), v.data() + v.size()};
}

} // namespace oracle
