#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace flowcheck::cli {

enum ExitCode : int {
    kOk = 0,
    kDiagnostics = 1, // validation diagnostics, or a property that does not hold
    kParse = 2,
    kStateLimit = 3,
    kProductLimit = 4,
    kUsage = 5,
};

/// Runs one command line (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace flowcheck::cli
