#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fairnav {

// Entry point behind the fairnav executable. `args` excludes the program
// name. Data goes to `out` or to the files named by flags, diagnostics to
// `err`. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fairnav
