#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace dimlift {

/// Weights tau_j of the tensor sample covariance sum_j tau_j x_j x_j^T.
struct CovarianceSpec {
  std::vector<double> weights;

  /// tau_j = 1/width for every column.
  static CovarianceSpec uniform(int width);
  /// tau_j = 1 for every column.
  static CovarianceSpec unit(int width);

  double total() const noexcept;
};

/// sum_j tau_j x_j x_j^T over the columns of `window`. Symmetric by construction.
Eigen::MatrixXd tensor_covariance(const Eigen::Ref<const Eigen::MatrixXd>& window,
                                  const CovarianceSpec& spec);

/// Full spectrum of a symmetric matrix, ascending.
std::vector<double> covariance_eigenvalues(const Eigen::Ref<const Eigen::MatrixXd>& m);

/// Aspect ratios. `c_ratio` follows the samples-over-dimension convention
/// (c = N'/n^k). The Marchenko-Pastur law below is parameterized by the
/// reciprocal, dimension over samples; convert only through these helpers.
double samples_per_dimension(long dim, long samples);
double dimension_per_sample(double c_ratio);

/// Marchenko-Pastur law for the ESD of (1/N) X X^T with X a p x N matrix of
/// i.i.d. entries of variance sigma2 and ratio = p/N. For ratio > 1 the law
/// has an atom of mass 1 - 1/ratio at zero.
class MarchenkoPastur {
 public:
  explicit MarchenkoPastur(double ratio, double sigma2 = 1.0);

  double ratio() const noexcept { return ratio_; }
  double sigma2() const noexcept { return sigma2_; }
  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }
  std::pair<double, double> support() const noexcept { return {lower_, upper_}; }
  double atom() const noexcept;

  /// Density of the absolutely continuous part.
  double pdf(double x) const noexcept;
  /// P(X <= x), including the atom at zero.
  double cdf(double x) const noexcept;
  /// P(X < x).
  double cdf_left(double x) const noexcept;

 private:
  double ratio_;
  double sigma2_;
  double lower_;
  double upper_;
};

/// Each row to empirical mean 0 and variance 1 (divisor = number of columns).
Eigen::MatrixXd row_standardize(const Eigen::Ref<const Eigen::MatrixXd>& x);

/// Haar-distributed n x n unitary: QR of an i.i.d. standard complex Gaussian
/// matrix with the phases of R's diagonal folded back into Q.
Eigen::MatrixXcd haar_unitary(int n, std::uint64_t seed);

/// Singular value equivalent of a (row-standardized) p x N' matrix X.
/// The matrix is first oriented so that it has no more rows than columns
/// (X^T is used when p > N'), giving an m x m result sqrt(X X^T / N') U with
/// U Haar unitary. With `row_normalize` each row is then rescaled to
/// empirical variance 1/m, which puts the outer ring radius at 1.
Eigen::MatrixXcd singular_value_equivalent(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                           std::uint64_t seed, bool row_normalize = true);

std::vector<std::complex<double>> ring_eigenvalues(const Eigen::MatrixXcd& m);

struct RingReference {
  double inner;
  double outer;
};

/// Single-ring law radii for aspect ratio c in (0, 1]: inner sqrt(1-c), outer 1.
RingReference ring_reference(double c);

/// Ratio used by the ring analysis: min(p, N') / max(p, N').
double ring_ratio(long dim, long samples);

/// Kolmogorov-Smirnov distance between the empirical CDF of `eigs` and the
/// law, checked on both sides of every eigenvalue. Eigenvalues within the
/// numerical PSD tolerance (1e-9 * max|eig|) of zero are treated as exact zeros.
double esd_ks_distance(std::span<const double> eigs, const MarchenkoPastur& law);

/// Fraction of eigenvalues with modulus in [inner - tol, outer + tol].
double ring_coverage(std::span<const std::complex<double>> eigs, const RingReference& ring,
                     double tol = 0.05);

struct SpectralSummary {
  long dim = 0;
  long samples = 0;
  double c_ratio = 0.0;             // N' / n^k
  double c_ratio_reciprocal = 0.0;  // n^k / N'
  std::pair<double, double> mp_support{0.0, 0.0};
  double ks_distance_mp = 0.0;
  long outliers_above_mp = 0;  // covariance eigenvalues beyond the upper edge
  double ring_c = 0.0;
  double ring_inner = 0.0;
  double ring_outer = 1.0;
  double ring_coverage = 0.0;
  std::vector<double> covariance_eigs;              // ascending, weights as given
  std::vector<std::complex<double>> ring_eigs;
};

/// Full spectral comparison of one window whose columns are lifted at
/// sqrt_dim scale. The covariance ESD is divided by the weight total before
/// it is compared with MP(n^k/N', sigma2), so unit weights and 1/N' weights
/// give the same distance.
SpectralSummary summarize_window(const Eigen::Ref<const Eigen::MatrixXd>& window,
                                 const CovarianceSpec& spec, std::uint64_t seed,
                                 double sigma2 = 1.0);

}  // namespace dimlift
