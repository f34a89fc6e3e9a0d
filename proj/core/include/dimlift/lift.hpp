#pragma once

#include <Eigen/Core>

#include "dimlift/data_model.hpp"

namespace dimlift {

/// Column scaling after the Kronecker lift.
///  unit_norm: every lifted column has Euclidean norm 1.
///  sqrt_dim:  columns are rescaled to norm sqrt(n^k), i.e. unit entry variance,
///             which is the scale the Marchenko-Pastur reference assumes.
enum class ScaleMode { unit_norm, sqrt_dim };

/// Entry (p, q) of the result, flattened as p * b.size() + q, is a_p * b_q.
Eigen::VectorXd kronecker(const Eigen::Ref<const Eigen::VectorXd>& a,
                          const Eigen::Ref<const Eigen::VectorXd>& b);

/// v / ||v||. The segment and time are only used in the error message.
Eigen::VectorXd normalize_segment(const Eigen::Ref<const Eigen::VectorXd>& v, int segment = 0,
                                  long t = 0);

/// Splits d into k contiguous segments of length n (after the optional
/// channel permutation), normalizes each and returns their left-to-right
/// Kronecker product. The result always has unit norm.
Eigen::VectorXd lift_column(const Eigen::Ref<const Eigen::VectorXd>& d, const LiftConfig& cfg,
                            long t = 0);

class LiftedMatrix {
 public:
  LiftedMatrix(Eigen::MatrixXd values, LiftConfig config, ScaleMode scale_mode, long t0)
      : values_(std::move(values)), config_(std::move(config)), scale_mode_(scale_mode), t0_(t0) {}

  long dim() const noexcept { return values_.rows(); }
  int samples() const noexcept { return static_cast<int>(values_.cols()); }
  long t0() const noexcept { return t0_; }
  const Eigen::MatrixXd& values() const noexcept { return values_; }
  const LiftConfig& config() const noexcept { return config_; }
  ScaleMode scale_mode() const noexcept { return scale_mode_; }

 private:
  Eigen::MatrixXd values_;
  LiftConfig config_;
  ScaleMode scale_mode_;
  long t0_;
};

LiftedMatrix lift_matrix(const SpatioTemporalMatrix& d, const LiftConfig& cfg,
                         ScaleMode mode);

}  // namespace dimlift
