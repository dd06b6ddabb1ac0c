#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nlsplit::cli {

// Exit codes are part of the interface.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

// Environment variable that overrides the configured output directory.
inline constexpr const char* kOutputDirEnv = "NLSPLIT_OUTPUT_DIR";

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Convenience overload; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nlsplit::cli
