#include "dimlift/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>


#include "dimlift/error.hpp"
#include "dimlift/random.hpp"
#include "linalg.hpp"

namespace dimlift {

CovarianceSpec CovarianceSpec::uniform(int width) {
  if (width < 1) fail(ErrorKind::dimension, "covariance weights need a positive width");
  return CovarianceSpec{std::vector<double>(static_cast<std::size_t>(width), 1.0 / width)};
}

CovarianceSpec CovarianceSpec::unit(int width) {
  if (width < 1) fail(ErrorKind::dimension, "covariance weights need a positive width");
  return CovarianceSpec{std::vector<double>(static_cast<std::size_t>(width), 1.0)};
}

double CovarianceSpec::total() const noexcept {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

Eigen::MatrixXd tensor_covariance(const Eigen::Ref<const Eigen::MatrixXd>& window,
                                  const CovarianceSpec& spec) {
  if (window.cols() == 0 || window.rows() == 0) fail(ErrorKind::dimension, "empty window");
  if (static_cast<long>(spec.weights.size()) != window.cols()) {
    std::ostringstream msg;
    msg << "covariance has " << spec.weights.size() << " weights for a window of "
        << window.cols() << " columns";
    fail(ErrorKind::dimension, msg.str());
  }
  for (double w : spec.weights) {
    if (!std::isfinite(w)) fail(ErrorKind::config, "non-finite covariance weight");
  }
  const Eigen::Map<const Eigen::VectorXd> tau(spec.weights.data(),
                                              static_cast<long>(spec.weights.size()));
  const long p = window.rows();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p, p);
  if ((tau.array() >= 0.0).all()) {
    // X diag(tau) X^T as a symmetric rank update of sqrt(tau)-scaled columns.
    const Eigen::MatrixXd scaled = window * tau.array().sqrt().matrix().asDiagonal();
    m.selfadjointView<Eigen::Lower>().rankUpdate(scaled);
  } else {
    m.triangularView<Eigen::Lower>() = window * tau.asDiagonal() * window.transpose();
  }
  m.triangularView<Eigen::StrictlyUpper>() = m.transpose();
  return m;
}

std::vector<double> covariance_eigenvalues(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  if (m.rows() != m.cols()) fail(ErrorKind::dimension, "covariance matrix is not square");
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    fail(ErrorKind::parameter, "covariance matrix is not symmetric");
  }
  const Eigen::VectorXd w = linalg::symmetric_eigenvalues(m);
  return {w.data(), w.data() + w.size()};
}

double samples_per_dimension(long dim, long samples) {
  if (dim < 1 || samples < 1) fail(ErrorKind::dimension, "aspect ratio of an empty matrix");
  return static_cast<double>(samples) / static_cast<double>(dim);
}

double dimension_per_sample(double c_ratio) {
  if (!(c_ratio > 0.0)) fail(ErrorKind::parameter, "aspect ratio must be positive");
  return 1.0 / c_ratio;
}

MarchenkoPastur::MarchenkoPastur(double ratio, double sigma2) : ratio_(ratio), sigma2_(sigma2) {
  if (!(ratio > 0.0) || !std::isfinite(ratio)) {
    fail(ErrorKind::parameter, "Marchenko-Pastur ratio must be positive");
  }
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    fail(ErrorKind::parameter, "Marchenko-Pastur variance must be positive");
  }
  const double s = std::sqrt(ratio);
  lower_ = sigma2 * (1.0 - s) * (1.0 - s);
  upper_ = sigma2 * (1.0 + s) * (1.0 + s);
}

double MarchenkoPastur::atom() const noexcept {
  return ratio_ > 1.0 ? 1.0 - 1.0 / ratio_ : 0.0;
}

double MarchenkoPastur::pdf(double x) const noexcept {
  if (x <= lower_ || x >= upper_ || x <= 0.0) return 0.0;
  return std::sqrt((upper_ - x) * (x - lower_)) / (2.0 * std::numbers::pi * sigma2_ * ratio_ * x);
}

double MarchenkoPastur::cdf(double x) const noexcept {
  if (x < 0.0) return 0.0;
  const double atom_mass = atom();
  if (x <= lower_) return atom_mass;
  if (x >= upper_) return 1.0;

  // Closed-form integral of the density after x = mid + rad * cos(theta).
  const double y = ratio_;
  const double s2 = sigma2_;
  const double mid = s2 * (1.0 + y);
  const double rad = 2.0 * s2 * std::sqrt(y);
  const double q = std::abs(1.0 - std::sqrt(y)) / (1.0 + std::sqrt(y));
  const double gap = s2 * std::abs(1.0 - y);
  auto g = [&](double th) {
    return -rad * std::sin(th) + mid * th -
           2.0 * gap * std::atan2(q * std::sin(th / 2.0), std::cos(th / 2.0));
  };
  const double theta = std::acos(std::clamp((x - mid) / rad, -1.0, 1.0));
  const double g_pi = std::numbers::pi * (mid - gap);
  const double cont = (g_pi - g(theta)) / (2.0 * std::numbers::pi * s2 * y);
  return std::clamp(atom_mass + cont, 0.0, 1.0);
}

double MarchenkoPastur::cdf_left(double x) const noexcept {
  if (x <= 0.0) return 0.0;
  return cdf(x);
}

Eigen::MatrixXd row_standardize(const Eigen::Ref<const Eigen::MatrixXd>& x) {
  if (x.cols() == 0) fail(ErrorKind::dimension, "cannot standardize an empty matrix");
  Eigen::MatrixXd out = x.colwise() - x.rowwise().mean();
  const double n = static_cast<double>(x.cols());
  for (long i = 0; i < out.rows(); ++i) {
    const double sd = std::sqrt(out.row(i).squaredNorm() / n);
    if (!(sd > 0.0)) {
      fail(ErrorKind::normalization, "row " + std::to_string(i) + " is constant");
    }
    out.row(i) /= sd;
  }
  return out;
}

Eigen::MatrixXcd haar_unitary(int n, std::uint64_t seed) {
  if (n < 1) fail(ErrorKind::dimension, "unitary size must be positive");
  Rng rng = make_rng(seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  Eigen::MatrixXcd z(n, n);
  for (long j = 0; j < n; ++j) {
    for (long i = 0; i < n; ++i) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      z(i, j) = {re, im};
    }
  }
  Eigen::VectorXcd r_diag;
  Eigen::MatrixXcd q = linalg::qr_unitary(std::move(z), r_diag);
  for (long j = 0; j < n; ++j) {
    const std::complex<double> d = r_diag(j);
    const double a = std::abs(d);
    q.col(j) *= a > 0.0 ? d / a : std::complex<double>(1.0, 0.0);
  }
  return q;
}

Eigen::MatrixXcd singular_value_equivalent(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                           std::uint64_t seed, bool row_normalize) {
  if (x.size() == 0) fail(ErrorKind::dimension, "empty matrix has no singular value equivalent");
  const bool transpose = x.rows() > x.cols();
  const Eigen::MatrixXd y = transpose ? Eigen::MatrixXd(x.transpose()) : Eigen::MatrixXd(x);
  const long m = y.rows();
  const double samples = static_cast<double>(y.cols());

  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(m, m);
  s.selfadjointView<Eigen::Lower>().rankUpdate(y, 1.0 / samples);
  s.triangularView<Eigen::StrictlyUpper>() = s.transpose();

  Eigen::VectorXd w;
  Eigen::MatrixXd v;
  linalg::symmetric_eigen(s, w, v);
  if (!w.allFinite()) fail(ErrorKind::numerical, "square root of a non-finite matrix");
  const Eigen::VectorXd root = w.cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd sqrt_s = v * root.asDiagonal() * v.transpose();

  // Real times complex as two real products.
  const Eigen::MatrixXcd u = haar_unitary(static_cast<int>(m), seed);
  Eigen::MatrixXcd xu(m, m);
  xu.real().noalias() = sqrt_s * u.real();
  xu.imag().noalias() = sqrt_s * u.imag();
  if (row_normalize) {
    const double target = 1.0 / std::sqrt(static_cast<double>(m));
    for (long i = 0; i < m; ++i) {
      const std::complex<double> mean = xu.row(i).mean();
      const double sd = std::sqrt((xu.row(i).array() - mean).abs2().mean());
      if (!(sd > 0.0)) {
        fail(ErrorKind::numerical, "singular value equivalent row " + std::to_string(i) +
                                       " has zero variance");
      }
      xu.row(i) *= target / sd;
    }
  }
  return xu;
}

std::vector<std::complex<double>> ring_eigenvalues(const Eigen::MatrixXcd& m) {
  return linalg::general_eigenvalues(m);
}

RingReference ring_reference(double c) {
  if (!(c > 0.0) || c > 1.0) {
    fail(ErrorKind::parameter, "ring law needs an aspect ratio in (0, 1]");
  }
  return {std::sqrt(1.0 - c), 1.0};
}

double ring_ratio(long dim, long samples) {
  if (dim < 1 || samples < 1) fail(ErrorKind::dimension, "aspect ratio of an empty matrix");
  return static_cast<double>(std::min(dim, samples)) / static_cast<double>(std::max(dim, samples));
}

double esd_ks_distance(std::span<const double> eigs, const MarchenkoPastur& law) {
  if (eigs.empty()) fail(ErrorKind::dimension, "no eigenvalues to compare");
  std::vector<double> v(eigs.begin(), eigs.end());
  double peak = 0.0;
  for (double e : v) peak = std::max(peak, std::abs(e));
  const double tol = 1e-9 * peak;
  for (double& e : v) {
    if (std::abs(e) <= tol) e = 0.0;
  }
  std::sort(v.begin(), v.end());
  const double m = static_cast<double>(v.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < v.size()) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    const double below = static_cast<double>(i) / m;  // #{< x} / m
    const double upto = static_cast<double>(j) / m;   // #{<= x} / m
    d = std::max(d, std::abs(law.cdf_left(v[i]) - below));
    d = std::max(d, std::abs(law.cdf(v[i]) - upto));
    i = j;
  }
  return std::min(d, 1.0);
}

double ring_coverage(std::span<const std::complex<double>> eigs, const RingReference& ring,
                     double tol) {
  if (eigs.empty()) fail(ErrorKind::dimension, "no eigenvalues to compare");
  const double lo = ring.inner - tol;
  const double hi = ring.outer + tol;
  std::size_t inside = 0;
  for (const auto& z : eigs) {
    const double r = std::abs(z);
    if (r >= lo && r <= hi) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(eigs.size());
}

SpectralSummary summarize_window(const Eigen::Ref<const Eigen::MatrixXd>& window,
                                 const CovarianceSpec& spec, std::uint64_t seed, double sigma2) {
  SpectralSummary s;
  s.dim = window.rows();
  s.samples = window.cols();
  s.c_ratio = samples_per_dimension(s.dim, s.samples);
  s.c_ratio_reciprocal = dimension_per_sample(s.c_ratio);

  s.covariance_eigs = covariance_eigenvalues(tensor_covariance(window, spec));
  const double total = spec.total();
  if (!(total > 0.0)) fail(ErrorKind::parameter, "covariance weights must have a positive sum");
  std::vector<double> scaled(s.covariance_eigs);
  for (double& e : scaled) e /= total;

  const MarchenkoPastur law(s.c_ratio_reciprocal, sigma2);
  s.mp_support = law.support();
  s.ks_distance_mp = esd_ks_distance(scaled, law);
  s.outliers_above_mp = std::count_if(scaled.begin(), scaled.end(),
                                      [&](double e) { return e > law.upper(); });

  s.ring_c = ring_ratio(s.dim, s.samples);
  const RingReference ring = ring_reference(s.ring_c);
  s.ring_inner = ring.inner;
  s.ring_outer = ring.outer;
  s.ring_eigs = ring_eigenvalues(singular_value_equivalent(row_standardize(window), seed));
  s.ring_coverage = ring_coverage(s.ring_eigs, ring);
  return s;
}

}  // namespace dimlift
