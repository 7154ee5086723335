#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rtflow::cli {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,  // verify: at least one bound violated
  kConfigError = 2,
  kFormatError = 3,
  kNumericalError = 4,
};

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rtflow::cli
