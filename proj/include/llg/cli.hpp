#pragma once

#include <iosfwd>

namespace llg {

/// Exit statuses of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitConfig = 2,
  kExitBlowup = 3,
  kExitLineSearch = 4,
};

/// llgctl entry point: simulate | optimize | verify | make-scenario | adjoint-check.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace llg
