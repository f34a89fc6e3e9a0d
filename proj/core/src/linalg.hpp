#pragma once

// Thin LAPACK wrappers for the eigenproblems on the per-window hot path.

#include <complex>
#include <vector>

#include <Eigen/Core>

namespace dimlift::linalg {

/// Ascending eigenvalues of a symmetric matrix (upper triangle is read).
Eigen::VectorXd symmetric_eigenvalues(Eigen::MatrixXd m);

/// Ascending eigenvalues and matching orthonormal eigenvectors (columns).
void symmetric_eigen(Eigen::MatrixXd m, Eigen::VectorXd& values, Eigen::MatrixXd& vectors);

/// Q of the QR factorization of a square complex matrix; `r_diag` receives
/// the diagonal of R.
Eigen::MatrixXcd qr_unitary(Eigen::MatrixXcd m, Eigen::VectorXcd& r_diag);

/// Eigenvalues of a general complex square matrix, in LAPACK order.
std::vector<std::complex<double>> general_eigenvalues(Eigen::MatrixXcd m);

}  // namespace dimlift::linalg
