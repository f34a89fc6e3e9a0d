#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace dimlift {

/// P channels by N sampling instants; column j holds the measurements taken
/// at sample index t0 + j. Values are finite and channel ids unique.
class SpatioTemporalMatrix {
 public:
  SpatioTemporalMatrix(Eigen::MatrixXd values, std::vector<std::string> channel_ids,
                       long t0 = 1);

  /// Channel ids default to "c1".."cP".
  explicit SpatioTemporalMatrix(Eigen::MatrixXd values, long t0 = 1);

  int channels() const noexcept { return static_cast<int>(values_.rows()); }
  int samples() const noexcept { return static_cast<int>(values_.cols()); }
  long t0() const noexcept { return t0_; }
  long t_end() const noexcept { return t0_ + samples() - 1; }

  const Eigen::MatrixXd& values() const noexcept { return values_; }
  const std::vector<std::string>& channel_ids() const noexcept { return channel_ids_; }

  Eigen::VectorXd column_at(long t) const;

 private:
  Eigen::MatrixXd values_;
  std::vector<std::string> channel_ids_;
  long t0_;
};

std::vector<std::string> default_channel_ids(int channels);

/// Factorization P = k * n for the Kronecker lift. An optional permutation
/// reorders channels before the contiguous segmentation.
struct LiftConfig {
  int k = 2;
  int n = 14;
  long max_dim = 4096;
  std::vector<int> permutation;  // 0-based channel order; empty = identity

  long lifted_dim() const noexcept;
  /// Throws Error(config|dimension) if the factorization does not fit P.
  void validate(int channels) const;

  /// Identity lift used for unlifted comparison runs.
  static LiftConfig unlifted(int channels) { return LiftConfig{1, channels, 4096, {}}; }
};

struct WindowSpec {
  int width = 200;
  int stride = 1;

  void validate(int samples) const;
};

enum class IndicatorKind { les, msr, rmse };

std::string_view to_string(IndicatorKind kind) noexcept;

/// Per-time-step indicator values. Point i belongs to sample index
/// start_index + i * stride.
struct IndicatorSeries {
  long start_index = 0;
  int stride = 1;
  IndicatorKind kind = IndicatorKind::les;
  std::vector<double> values;
  std::optional<double> normalization_max;  // set once normalized

  std::size_t size() const noexcept { return values.size(); }
  long time_at(std::size_t i) const noexcept {
    return start_index + static_cast<long>(i) * stride;
  }
  /// Index of the point at sample t, if one exists.
  std::optional<std::size_t> index_of(long t) const noexcept;
};

/// CSV layout: header row of channel ids, one row per sampling instant.
/// A leading column named "t" carries integer sample indices.
SpatioTemporalMatrix read_matrix(std::istream& in);
SpatioTemporalMatrix load_matrix(const std::filesystem::path& path);

/// Writes the "t" column followed by every channel at 17 significant digits.
void write_matrix(std::ostream& out, const SpatioTemporalMatrix& d);
void save_matrix(const std::filesystem::path& path, const SpatioTemporalMatrix& d);

/// First differences along time: column j is d(t0 + j + 1) - d(t0 + j).
SpatioTemporalMatrix residual_matrix(const SpatioTemporalMatrix& d);

}  // namespace dimlift
