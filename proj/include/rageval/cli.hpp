#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rageval::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,        // anything not covered below
    kConfig = 2,         // config, flags or malformed input
    kProvider = 3,       // backend failure, including rejected credentials
    kEmptyInput = 4,
    kMissingField = 5,   // an input lacks a field a later stage needs
    kStatsParams = 6,    // invalid bootstrap parameters or values
};

/// Runs one command. `args` excludes the program name. Reports go to the
/// --out directory; `out` gets a short summary, `err` diagnostics.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rageval::cli
