#include "elasteig/dense_oracle.hpp"

#include <Eigen/Dense>

#include "elasteig/error.hpp"

namespace elasteig {

std::vector<double> dense_reference_eigenvalues(const SystemMatrices& m) {
  const Eigen::MatrixXd A(m.A);
  const Eigen::MatrixXd B(m.B);
  const Eigen::MatrixXd C(m.C);
  const Eigen::MatrixXd M(m.M);

  Eigen::MatrixXd lhs, rhs;
  if (C.cwiseAbs().maxCoeff() > 0.0) {
    Eigen::LLT<Eigen::MatrixXd> llt(C);
    if (llt.info() != Eigen::Success) throw SolverError("dense oracle: C is not positive definite");
    lhs = A + B.transpose() * llt.solve(B);
    rhs = M;
  } else {
    // Orthonormal basis of ker(B) from the SVD of B.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double cut = 1e-10 * (s.size() > 0 ? s[0] : 1.0);
    int rank = 0;
    for (int i = 0; i < s.size(); ++i) rank += s[i] > cut ? 1 : 0;
    const Eigen::MatrixXd Z = svd.matrixV().rightCols(B.cols() - rank);
    lhs = Z.transpose() * A * Z;
    rhs = Z.transpose() * M * Z;
  }
  lhs = 0.5 * (lhs + lhs.transpose()).eval();
  rhs = 0.5 * (rhs + rhs.transpose()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(lhs, rhs, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw SolverError("dense oracle: eigensolver failed");
  const Eigen::VectorXd ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

} // namespace elasteig
