#pragma once

#include <iosfwd>

namespace ocrqa::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 1,
  kParseError = 2,
  kEvaluationError = 3,
};

/// Runs one `ocrqa` invocation. argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ocrqa::cli
