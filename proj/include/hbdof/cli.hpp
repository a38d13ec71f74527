#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hbdof {

/// Command-line entry point (subcommands: dof, simulate, preset). Returns the
/// process exit code: 0 on success, 2 on usage/validation errors, 3 on
/// numerical or convergence degradation.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hbdof
