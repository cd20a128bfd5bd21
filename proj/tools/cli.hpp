#pragma once

// Command-line front end. Exit codes: 0 success, 1 I/O or input-format error,
// 2 configuration or usage error.

#include <iosfwd>
#include <string>
#include <vector>

namespace refinery::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitConfig = 2;

inline constexpr const char* kVersion = "0.1.0";

// Default data directory for tables, rule sets and lexicons.
inline constexpr const char* kDataDirEnv = "REFINERY_DATA_DIR";

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace refinery::cli
