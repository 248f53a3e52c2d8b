#pragma once

#include <iosfwd>

namespace secbeam::cli {

enum exit_code : int { ok = 0, usage = 1, parse_failure = 2, domain_failure = 3 };

/// Runs the command line.  Results go to `out` (or --out), the summary line and
/// diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace secbeam::cli
