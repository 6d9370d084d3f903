#pragma once

#include <iosfwd>

#include "hypermane/problem_spec.hpp"

namespace hypermane {

enum ExitCode : int {
  kExitOk = 0,
  kExitBadSpec = 1,
  kExitNotConverged = 2,
  kExitObstruction = 3,
  kExitChecksFailed = 4,
};

/// Diagnostics sink; silent when quiet.
struct Diagnostics {
  std::ostream* err = nullptr;
  bool quiet = false;

  void info(const std::string& msg) const;
  void error(const std::string& msg) const;
};

int cmd_geodesic(const ProblemSpec& spec, const Diagnostics& diag);
int cmd_hyperbolic(const ProblemSpec& spec, const Diagnostics& diag);
int cmd_verify(const ProblemSpec& spec, const Diagnostics& diag);

/// Dispatches on spec.command, translating errors into exit codes.
int run_command(const ProblemSpec& spec, const Diagnostics& diag);

}  // namespace hypermane
