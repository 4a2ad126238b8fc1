#pragma once

#include <iosfwd>

namespace ammlab::cli {

enum ExitCode : int {
  kOk = 0,
  kUsageError = 2,       // bad flags, unreadable or malformed scenario, bad parameters
  kMechanismError = 3,   // the mechanism could not produce an output
  kAuditFailed = 4,
  kVerificationFailed = 5,
};

/// Entry point shared by the binary and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ammlab::cli
