#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hopls::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 2,      ///< bad flags, conflicting options, unknown values
    kParse = 3,      ///< unreadable, unwritable or malformed files
    kDimension = 4,  ///< shapes or ranks that do not fit together
    kNumerical = 5,  ///< degenerate data or non-converging kernels
};

/// Runs one `hopls <command> ...` invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hopls::cli
