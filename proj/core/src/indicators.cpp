#include "dimlift/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dimlift/error.hpp"

namespace dimlift {

TestFunction TestFunction::entropy() { return {Kind::entropy, {}}; }

TestFunction TestFunction::likelihood_ratio() { return {Kind::likelihood_ratio, {}}; }

TestFunction TestFunction::chebyshev(std::vector<double> coefficients) {
  if (coefficients.empty()) fail(ErrorKind::config, "chebyshev test function needs coefficients");
  for (double a : coefficients) {
    if (!std::isfinite(a)) fail(ErrorKind::config, "non-finite chebyshev coefficient");
  }
  return {Kind::chebyshev, std::move(coefficients)};
}

std::string TestFunction::name() const {
  switch (kind_) {
    case Kind::entropy: return "entropy";
    case Kind::likelihood_ratio: return "likelihood_ratio";
    case Kind::chebyshev: return "chebyshev";
  }
  return "unknown";
}

double TestFunction::operator()(double x) const noexcept {
  switch (kind_) {
    case Kind::entropy:
      return x > 0.0 ? -x * std::log(x) : 0.0;
    case Kind::likelihood_ratio:
      return x - std::log(x) - 1.0;
    case Kind::chebyshev: {
      double acc = 0.0;
      for (double a : coefficients_) acc = acc * x + a;
      return acc;
    }
  }
  return 0.0;
}

TestFunction parse_test_function(const std::string& name, std::vector<double> coefficients) {
  if (name == "entropy") return TestFunction::entropy();
  if (name == "likelihood_ratio") return TestFunction::likelihood_ratio();
  if (name == "chebyshev") return TestFunction::chebyshev(std::move(coefficients));
  fail(ErrorKind::config, "unknown test function '" + name + "'");
}

double les(std::span<const double> eigs, const TestFunction& phi) {
  if (phi.kind() == TestFunction::Kind::chebyshev) {
    double sum = 0.0;
    for (double e : eigs) sum += phi(e);
    return sum;
  }
  double peak = 0.0;
  for (double e : eigs) peak = std::max(peak, std::abs(e));
  const double tol = 1e-9 * peak;
  double sum = 0.0;
  for (double e : eigs) {
    if (e < -tol) {
      std::ostringstream msg;
      msg << "eigenvalue " << e << " is outside the domain of the " << phi.name()
          << " test function";
      fail(ErrorKind::domain, msg.str());
    }
    sum += phi(std::max(e, kEigenvalueFloor));
  }
  return sum;
}

double msr(std::span<const std::complex<double>> eigs) {
  if (eigs.empty()) fail(ErrorKind::dimension, "mean spectral radius of an empty spectrum");
  double sum = 0.0;
  for (const auto& z : eigs) sum += std::abs(z);
  return sum / static_cast<double>(eigs.size());
}

IndicatorSeries normalize_curve(IndicatorSeries series) {
  if (series.values.empty()) fail(ErrorKind::normalization, "cannot normalize an empty curve");
  const double peak = *std::max_element(series.values.begin(), series.values.end());
  if (!(peak > 0.0)) {
    fail(ErrorKind::normalization,
         std::string(to_string(series.kind)) + " curve has no positive value");
  }
  for (double& v : series.values) v /= peak;
  series.normalization_max = series.normalization_max.value_or(1.0) * peak;
  return series;
}

}  // namespace dimlift
