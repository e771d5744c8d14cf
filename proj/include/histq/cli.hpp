#pragma once

#include <ostream>

namespace histq::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kValidation = 2, kSize = 3, kNumerical = 4 };

/// Runs the histq command line. Data goes to out, diagnostics to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace histq::cli
