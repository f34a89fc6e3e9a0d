#include "linalg.hpp"

#include <lapacke.h>

#include <sstream>

#include "dimlift/error.hpp"

namespace dimlift::linalg {

namespace {

[[noreturn]] void eigen_failure(const char* routine, lapack_int info, const Eigen::MatrixXd& m) {
  std::ostringstream msg;
  msg << routine << " failed (info=" << info << ") on a " << m.rows() << "x" << m.cols()
      << " matrix; frobenius=" << m.norm() << ", diag range=[" << m.diagonal().minCoeff() << ", "
      << m.diagonal().maxCoeff() << "], finite=" << (m.allFinite() ? "yes" : "no");
  fail(ErrorKind::numerical, msg.str());
}

}  // namespace

Eigen::VectorXd symmetric_eigenvalues(Eigen::MatrixXd m) {
  if (m.rows() != m.cols()) fail(ErrorKind::dimension, "eigenvalues of a non-square matrix");
  const Eigen::MatrixXd original = m;
  Eigen::VectorXd w(m.rows());
  if (m.rows() == 0) return w;
  const lapack_int n = static_cast<lapack_int>(m.rows());
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'U', n, m.data(), n, w.data());
  if (info != 0) eigen_failure("dsyevd", info, original);
  return w;
}

void symmetric_eigen(Eigen::MatrixXd m, Eigen::VectorXd& values, Eigen::MatrixXd& vectors) {
  if (m.rows() != m.cols()) fail(ErrorKind::dimension, "eigenvalues of a non-square matrix");
  const lapack_int n = static_cast<lapack_int>(m.rows());
  values.resize(n);
  if (n == 0) {
    vectors.resize(0, 0);
    return;
  }
  const Eigen::MatrixXd original = m;
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, m.data(), n, values.data());
  if (info != 0) eigen_failure("dsyevd", info, original);
  vectors = std::move(m);
}

Eigen::MatrixXcd qr_unitary(Eigen::MatrixXcd m, Eigen::VectorXcd& r_diag) {
  if (m.rows() != m.cols()) fail(ErrorKind::dimension, "QR of a non-square matrix");
  const lapack_int n = static_cast<lapack_int>(m.rows());
  r_diag.resize(n);
  if (n == 0) return m;
  auto* a = reinterpret_cast<lapack_complex_double*>(m.data());
  std::vector<lapack_complex_double> tau(static_cast<std::size_t>(n));
  lapack_int info = LAPACKE_zgeqrf(LAPACK_COL_MAJOR, n, n, a, n, tau.data());
  if (info != 0) fail(ErrorKind::numerical, "zgeqrf failed (info=" + std::to_string(info) + ")");
  r_diag = m.diagonal();
  info = LAPACKE_zungqr(LAPACK_COL_MAJOR, n, n, n, a, n, tau.data());
  if (info != 0) fail(ErrorKind::numerical, "zungqr failed (info=" + std::to_string(info) + ")");
  return m;
}

std::vector<std::complex<double>> general_eigenvalues(Eigen::MatrixXcd m) {
  if (m.rows() != m.cols()) fail(ErrorKind::dimension, "eigenvalues of a non-square matrix");
  const lapack_int n = static_cast<lapack_int>(m.rows());
  std::vector<std::complex<double>> w(static_cast<std::size_t>(n));
  if (n == 0) return w;
  if (!m.allFinite()) fail(ErrorKind::numerical, "complex eigenproblem with non-finite entries");
  const lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'N', 'N', n, reinterpret_cast<lapack_complex_double*>(m.data()), n,
      reinterpret_cast<lapack_complex_double*>(w.data()), nullptr, 1, nullptr, 1);
  if (info != 0) {
    std::ostringstream msg;
    msg << "zgeev failed (info=" << info << ") on a " << n << "x" << n
        << " matrix; frobenius=" << m.norm();
    fail(ErrorKind::numerical, msg.str());
  }
  return w;
}

}  // namespace dimlift::linalg
