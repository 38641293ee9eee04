#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pdarcy::cli {

enum ExitCode : int {
    ok = 0,
    validation_failure = 1,
    nonconvergence = 2,
    io_error = 3,
    usage_error = 64,
};

/// Runs one subcommand. Data goes to files or `out`, diagnostics to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int dispatch(int argc, char** argv);

std::string usage();

}  // namespace pdarcy::cli
