#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace faota::cli {

/// Parses `args` (without the program name), runs the subcommand and maps errors
/// to exit statuses: 0 pass, 1 failed check, 2 usage or config error, 3 I/O error.
int cli_main(const std::vector<std::string>& args, std::ostream& log, std::ostream& err);

}  // namespace faota::cli
