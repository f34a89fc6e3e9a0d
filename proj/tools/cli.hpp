#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dimlift::cli {

/// Exit codes of the dimlift tool.
enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kConfig = 2,        // configuration, file format or parse failure
  kPrecondition = 3,  // too few samples, window does not fit, bad shape
  kNumerical = 4,     // solver failure, non-finite training, domain errors
};

/// Runs one dimlift command. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

}  // namespace dimlift::cli
