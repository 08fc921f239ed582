#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lpp::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kCapacity = 3,
  kInsufficientData = 4,
};

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lpp::cli
