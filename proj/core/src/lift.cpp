#include "dimlift/lift.hpp"

#include <cmath>
#include <string>

#include "dimlift/error.hpp"

namespace dimlift {

Eigen::VectorXd kronecker(const Eigen::Ref<const Eigen::VectorXd>& a,
                          const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.size() == 0 || b.size() == 0)
    fail(ErrorKind::dimension, "kronecker product of an empty vector");
  Eigen::VectorXd out(a.size() * b.size());
  for (Eigen::Index p = 0; p < a.size(); ++p) out.segment(p * b.size(), b.size()) = a(p) * b;
  return out;
}

Eigen::VectorXd normalize_segment(const Eigen::Ref<const Eigen::VectorXd>& v, int segment,
                                  long t) {
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm))
    fail(ErrorKind::normalization, "segment " + std::to_string(segment + 1) + " at t=" +
                                       std::to_string(t) + " has zero norm");
  return v / norm;
}

Eigen::VectorXd lift_column(const Eigen::Ref<const Eigen::VectorXd>& d, const LiftConfig& cfg,
                            long t) {
  cfg.validate(static_cast<int>(d.size()));
  Eigen::VectorXd ordered;
  if (cfg.permutation.empty()) {
    ordered = d;
  } else {
    ordered.resize(d.size());
    for (Eigen::Index i = 0; i < d.size(); ++i)
      ordered(i) = d(cfg.permutation[static_cast<std::size_t>(i)]);
  }
  Eigen::VectorXd lifted = normalize_segment(ordered.head(cfg.n), 0, t);
  for (int l = 1; l < cfg.k; ++l)
    lifted = kronecker(lifted, normalize_segment(ordered.segment(l * cfg.n, cfg.n), l, t));
  return lifted;
}

LiftedMatrix lift_matrix(const SpatioTemporalMatrix& d, const LiftConfig& cfg, ScaleMode mode) {
  cfg.validate(d.channels());
  const long dim = cfg.lifted_dim();
  const double scale = mode == ScaleMode::sqrt_dim ? std::sqrt(static_cast<double>(dim)) : 1.0;
  Eigen::MatrixXd out(dim, d.samples());
  for (int j = 0; j < d.samples(); ++j)
    out.col(j) = scale * lift_column(d.values().col(j), cfg, d.t0() + j);
  return LiftedMatrix(std::move(out), cfg, mode, d.t0());
}

}  // namespace dimlift
