#pragma once

#include <iosfwd>

namespace ibrsc {

/// Exit codes: 0 success, 1 solver non-convergence (reports still written),
/// 2 input error. Diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ibrsc
