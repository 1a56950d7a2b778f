#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kitoke::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 2,
    exit_io = 3,
    exit_math = 4,
};

// args excludes the program name. Diagnostics (including the machine-readable
// error object) go to err; out carries results and echoed output paths.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

} // namespace kitoke::cli
