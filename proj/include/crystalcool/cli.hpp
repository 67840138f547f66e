#pragma once

#include <iosfwd>

namespace crystalcool::cli {

// Parses argv, dispatches a subcommand and writes tables to `out` (or to the
// --out directory, together with manifest.txt). Errors go to `err` as one line
// "error code=E_... message=..." and a nonzero status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace crystalcool::cli
