#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dimlift {

/// Failure categories. The CLI maps them onto process exit codes.
enum class ErrorKind {
  format,         // malformed file layout (ragged CSV rows, empty data section)
  parse,          // unparsable cell or JSON value
  config,         // invalid configuration document or parameter combination
  parameter,      // out-of-range argument to a numerical routine
  dimension,      // shape mismatch or too few channels/samples
  window,         // moving window does not fit the available history
  normalization,  // zero-norm segment or non-positive curve
  domain,         // value outside a test function's domain
  numerical,      // eigen/linear-algebra failure
  divergence,     // non-finite training loss
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace dimlift
