#pragma once

#include <ostream>

namespace semiot::cli {

enum ExitCode : int {
  kOk = 0,
  kMismatch = 1,  ///< replay produced different checksums
  kInput = 2,
  kOracle = 3,
  kNumeric = 4,
  kUsage = 64,
};

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace semiot::cli
