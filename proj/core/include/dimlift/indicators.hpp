#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "dimlift/data_model.hpp"

namespace dimlift {

/// Test function phi of a linear eigenvalue statistic.
class TestFunction {
 public:
  enum class Kind { chebyshev, entropy, likelihood_ratio };

  /// phi(x) = -x ln x, with phi(0) = 0.
  static TestFunction entropy();
  /// phi(x) = x - ln x - 1.
  static TestFunction likelihood_ratio();
  /// Polynomial a0 x^n + a1 x^(n-1) + ... + an; coefficients run from the
  /// leading term down to the constant, so {1, 0} is the identity.
  static TestFunction chebyshev(std::vector<double> coefficients);

  Kind kind() const noexcept { return kind_; }
  const std::vector<double>& coefficients() const noexcept { return coefficients_; }
  std::string name() const;

  /// Evaluates phi at an eigenvalue that already passed the domain policy.
  double operator()(double x) const noexcept;

 private:
  TestFunction(Kind kind, std::vector<double> coefficients)
      : kind_(kind), coefficients_(std::move(coefficients)) {}

  Kind kind_;
  std::vector<double> coefficients_;
};

TestFunction parse_test_function(const std::string& name, std::vector<double> coefficients = {});

/// Eigenvalues in [-1e-9 * max|eig|, floor) are lifted to this floor before a
/// logarithmic test function is applied.
inline constexpr double kEigenvalueFloor = 1e-12;

/// N[phi] = sum_i phi(lambda_i).
double les(std::span<const double> eigs, const TestFunction& phi);

/// Mean modulus of the eigenvalues.
double msr(std::span<const std::complex<double>> eigs);

/// Divides by the series maximum and records it.
IndicatorSeries normalize_curve(IndicatorSeries series);

}  // namespace dimlift
