#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sarges::cli {

enum ExitCode : int { kOk = 0, kDomainError = 1, kUsageError = 2 };

/// Runs the `sarges` command line. `args` excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sarges::cli
