#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fakeflow::cli {

/// Exit codes are the CLI's machine contract.
enum ExitCode : int { kSuccess = 0, kError = 1, kPartial = 2 };

/// Runs the `fakeflow` command line. `args` excludes the program name, e.g.
/// {"gen", "--images", "imgs", "--depths", "deps", "--out", "out"}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fakeflow::cli
