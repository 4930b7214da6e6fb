#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace slopecam {

inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kValidation = 1, kIo = 2, kDivergence = 3 };

/// Runs one command line (without the program name). Never throws.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace slopecam
