#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "salm/tensor.hpp"

namespace salm::cli {

/// Process exit codes.
enum ExitCode : int {
    kConverged = 0,
    kFailure = 1,  // I/O or file-format problems, failed bench cells
    kMaxIter = 2,
    kNumericalError = 3,
    kUsage = 64,
};

/// Extents separated by 'x', e.g. "50x50x50" or "20x20x30x30".
Shape parse_shape(std::string_view text);

/// Comma-separated positive integers, e.g. "9,9,3".
std::vector<std::size_t> parse_ranks(std::string_view text);

/// Runs the command line `salm <subcommand> ...`; args excludes the program name.
/// Subcommands: gen, solve, bench, inpaint.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace salm::cli
