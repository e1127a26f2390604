#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pbx {

enum ExitStatus : int { kExitPass = 0, kExitUsage = 1, kExitCheckFailed = 2 };

/// pbx {build|verify|bcs|zak|lattice|all} --config PATH [--out DIR] [--seed N]
/// `args` excludes the program name. Writes report.json, run_meta.json and
/// CSV artifacts into the output directory.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pbx
