#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fpcavity::cli
{
enum ExitCode : int
{
    kOk = 0,
    kAnalysisFailure = 1,
    kUsageError = 2,
};

// Runs one `fpcav` invocation; args exclude the program name.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);
} // namespace fpcavity::cli
