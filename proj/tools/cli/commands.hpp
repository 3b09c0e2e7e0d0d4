#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"

namespace faota::cli {

enum ExitStatus : int {
  kExitPass = 0,
  kExitCheckFailed = 1,
  kExitUsage = 2,
  kExitIo = 3,
};

/// One resolved subcommand invocation.
struct Invocation {
  std::string command;              // cdf-mse, pmf-users, port-sweep, copula-check, train, bound
  std::vector<std::string> arguments;
  Config config;
  bool ideal_only = false;          // train --benchmark ideal
};

/// Names accepted by run_command, in help order.
const std::vector<std::string>& command_names();

/// Runs a subcommand, writes its outputs and manifest.json under output.dir and
/// returns kExitPass or kExitCheckFailed. Progress goes to `log`, warnings and
/// failing checks to `err`. Throws ConfigError or IoError.
int run_command(const Invocation& inv, std::ostream& log, std::ostream& err);

}  // namespace faota::cli
