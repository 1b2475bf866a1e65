#pragma once

#include <vector>

#include "elasteig/fem.hpp"

namespace elasteig {

/// Reference spectrum of the reduced saddle-point pencil computed densely by
/// eliminating the pressure. For 1/lambda > 0 the pencil becomes
/// (A + B^T C^{-1} B, M); in the Stokes limit it is restricted to the null
/// space of B. Returns all finite eigenvalues in ascending order.
///
/// Intended for small systems (a few hundred dofs); independent of the
/// sparse factorization and Krylov iteration used by solve_eigen.
std::vector<double> dense_reference_eigenvalues(const SystemMatrices& m);

} // namespace elasteig
