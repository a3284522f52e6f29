#pragma once

#include <iosfwd>

namespace mvcr::cli {

enum ExitCode : int { kOk = 0, kComputationFailed = 1, kUsageError = 2 };

/// Entry point of the `mvcr` tool. Tabular results go to `out` (or to --out),
/// diagnostics and usage text to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mvcr::cli
