#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace veil::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 2;        // malformed input or usage
inline constexpr int kExitPrecondition = 3; // well-formed input the operation rejects
inline constexpr int kExitIo = 4;

/// Runs one `veil` invocation; `args` excludes the program name. Results go
/// to `out` unless an output path is given, diagnostics to `err` as a single
/// `veil: error: ...` line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace veil::cli
