#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mbplan::cli {

/// Exit statuses shared by every subcommand.
enum Exit : int {
  kOk = 0,
  kInputError = 1,  // I/O, parse or usage failure
  kFindings = 2,    // validation errors, rejected plan
  kUnsolvable = 3,
  kResourceLimit = 4,
};

/// Runs `mbplan <args...>` (args exclude the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mbplan::cli
