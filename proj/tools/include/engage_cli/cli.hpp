#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace engage::cli {

// Exit codes: 0 success, 1 validation/usage error, 2 internal error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitInternal = 2;

// `args` excludes the program name. Payloads go to `out` (or --out files),
// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace engage::cli
