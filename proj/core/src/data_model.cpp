#include "dimlift/data_model.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "dimlift/error.hpp"

namespace dimlift {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::format: return "format";
    case ErrorKind::parse: return "parse";
    case ErrorKind::config: return "config";
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::window: return "window";
    case ErrorKind::normalization: return "normalization";
    case ErrorKind::domain: return "domain";
    case ErrorKind::numerical: return "numerical";
    case ErrorKind::divergence: return "divergence";
  }
  return "unknown";
}

std::string_view to_string(IndicatorKind kind) noexcept {
  switch (kind) {
    case IndicatorKind::les: return "LES";
    case IndicatorKind::msr: return "MSR";
    case IndicatorKind::rmse: return "RMSE";
  }
  return "unknown";
}

std::vector<std::string> default_channel_ids(int channels) {
  std::vector<std::string> ids;
  ids.reserve(static_cast<std::size_t>(channels));
  for (int i = 1; i <= channels; ++i) ids.push_back("c" + std::to_string(i));
  return ids;
}

SpatioTemporalMatrix::SpatioTemporalMatrix(Eigen::MatrixXd values,
                                           std::vector<std::string> channel_ids, long t0)
    : values_(std::move(values)), channel_ids_(std::move(channel_ids)), t0_(t0) {
  if (values_.rows() < 1 || values_.cols() < 1)
    fail(ErrorKind::dimension, "matrix must have at least one channel and one sample");
  if (static_cast<Eigen::Index>(channel_ids_.size()) != values_.rows())
    fail(ErrorKind::dimension, "expected " + std::to_string(values_.rows()) +
                                   " channel ids, got " + std::to_string(channel_ids_.size()));
  if (!values_.allFinite()) fail(ErrorKind::parse, "matrix contains NaN or Inf entries");
  std::unordered_set<std::string> seen;
  for (const auto& id : channel_ids_)
    if (!seen.insert(id).second) fail(ErrorKind::format, "duplicate channel id '" + id + "'");
}

SpatioTemporalMatrix::SpatioTemporalMatrix(Eigen::MatrixXd values, long t0)
    : SpatioTemporalMatrix(values, default_channel_ids(static_cast<int>(values.rows())), t0) {}

Eigen::VectorXd SpatioTemporalMatrix::column_at(long t) const {
  if (t < t0_ || t > t_end())
    fail(ErrorKind::window, "sample " + std::to_string(t) + " outside [" +
                                std::to_string(t0_) + ", " + std::to_string(t_end()) + "]");
  return values_.col(t - t0_);
}

long LiftConfig::lifted_dim() const noexcept {
  long dim = 1;
  for (int i = 0; i < k; ++i) dim *= n;
  return dim;
}

void LiftConfig::validate(int channels) const {
  if (k < 1) fail(ErrorKind::config, "lift k must be >= 1");
  if (k > 4) fail(ErrorKind::config, "lift k must be <= 4");
  if (n < 2) fail(ErrorKind::config, "lift segment length n must be >= 2");
  if (static_cast<long>(k) * n != channels)
    fail(ErrorKind::dimension, "lift requires P = k*n, got P=" + std::to_string(channels) +
                                   ", k=" + std::to_string(k) + ", n=" + std::to_string(n));
  if (lifted_dim() > max_dim)
    fail(ErrorKind::config, "lifted dimension " + std::to_string(lifted_dim()) +
                                " exceeds cap " + std::to_string(max_dim));
  if (!permutation.empty()) {
    if (static_cast<int>(permutation.size()) != channels)
      fail(ErrorKind::config, "channel permutation must list every channel once");
    std::vector<bool> hit(static_cast<std::size_t>(channels), false);
    for (int c : permutation) {
      if (c < 0 || c >= channels || hit[static_cast<std::size_t>(c)])
        fail(ErrorKind::config, "channel permutation is not a permutation of 0..P-1");
      hit[static_cast<std::size_t>(c)] = true;
    }
  }
}

void WindowSpec::validate(int samples) const {
  if (width < 2) fail(ErrorKind::config, "window width must be >= 2");
  if (stride < 1) fail(ErrorKind::config, "window stride must be >= 1");
  if (width > samples)
    fail(ErrorKind::window, "window width " + std::to_string(width) + " exceeds " +
                                std::to_string(samples) + " available samples");
}

std::optional<std::size_t> IndicatorSeries::index_of(long t) const noexcept {
  if (t < start_index || stride < 1) return std::nullopt;
  const long offset = t - start_index;
  if (offset % stride != 0) return std::nullopt;
  const auto i = static_cast<std::size_t>(offset / stride);
  if (i >= values.size()) return std::nullopt;
  return i;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_number(const std::string& cell, long line, std::size_t column) {
  const std::string text = trim(cell);
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v))
    fail(ErrorKind::parse, "line " + std::to_string(line) + ", column " +
                               std::to_string(column + 1) + ": cannot parse '" + text +
                               "' as a finite number");
  return v;
}

}  // namespace

SpatioTemporalMatrix read_matrix(std::istream& in) {
  std::string line;
  long line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_csv_line(line);
      break;
    }
  }
  if (header.empty()) fail(ErrorKind::format, "missing header row");
  for (auto& h : header) h = trim(h);
  if (!header.empty() && header.front().rfind("\xEF\xBB\xBF", 0) == 0)
    header.front().erase(0, 3);

  const bool has_t = header.front() == "t";
  std::vector<std::string> ids(header.begin() + (has_t ? 1 : 0), header.end());
  if (ids.size() < 2)
    fail(ErrorKind::dimension, "need at least 2 channels, header lists " +
                                   std::to_string(ids.size()));

  std::vector<std::vector<double>> rows;
  std::vector<long> times;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      fail(ErrorKind::format, "ragged row at line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(header.size()) + " fields, got " +
                                  std::to_string(fields.size()));
    std::size_t col = 0;
    if (has_t) {
      const double t = parse_number(fields[0], line_no, 0);
      if (t != std::floor(t))
        fail(ErrorKind::parse, "line " + std::to_string(line_no) + ": t must be an integer");
      times.push_back(static_cast<long>(t));
      col = 1;
    }
    std::vector<double> row;
    row.reserve(ids.size());
    for (; col < fields.size(); ++col) row.push_back(parse_number(fields[col], line_no, col));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(ErrorKind::format, "no samples");

  long t0 = 1;
  if (has_t) {
    t0 = times.front();
    for (std::size_t i = 1; i < times.size(); ++i)
      if (times[i] != times[i - 1] + 1)
        fail(ErrorKind::format, "t column must increase by 1 per row (row " +
                                    std::to_string(i + 1) + ")");
  }

  Eigen::MatrixXd values(static_cast<Eigen::Index>(ids.size()),
                         static_cast<Eigen::Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j)
    for (std::size_t i = 0; i < ids.size(); ++i)
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[j][i];
  return SpatioTemporalMatrix(std::move(values), std::move(ids), t0);
}

SpatioTemporalMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::format, "cannot open " + path.string());
  return read_matrix(in);
}

void write_matrix(std::ostream& out, const SpatioTemporalMatrix& d) {
  out << 't';
  for (const auto& id : d.channel_ids()) out << ',' << id;
  out << '\n';
  char buf[40];
  for (int j = 0; j < d.samples(); ++j) {
    out << d.t0() + j;
    for (int i = 0; i < d.channels(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", d.values()(i, j));
      out << ',' << buf;
    }
    out << '\n';
  }
}

void save_matrix(const std::filesystem::path& path, const SpatioTemporalMatrix& d) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::format, "cannot write " + path.string());
  write_matrix(out, d);
  if (!out) fail(ErrorKind::format, "write failed for " + path.string());
}

SpatioTemporalMatrix residual_matrix(const SpatioTemporalMatrix& d) {
  if (d.samples() < 2) fail(ErrorKind::dimension, "residual matrix needs N >= 2 samples");
  const Eigen::Index n = d.samples() - 1;
  Eigen::MatrixXd diff = d.values().rightCols(n) - d.values().leftCols(n);
  return SpatioTemporalMatrix(std::move(diff), d.channel_ids(), d.t0() + 1);
}

}  // namespace dimlift
