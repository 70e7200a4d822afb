#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hjac::cli {

enum ExitCode : int {
    kOk = 0,
    kInternal = 1,
    kUsage = 2,
    kIo = 3,
    kNumericalSingularity = 4,
    kDefinitenessLost = 5,
    kNonConvergence = 6,
    kCheckFailed = 7,
    kRankDeficient = 8,
};

/// Entry point of the `hjac` tool. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hjac::cli
