#pragma once

#include <ostream>

namespace mtms::cli {

// Parses argv, runs one subcommand and maps failures onto ExitCode values.
// Verbose training output is enabled by --verbose or a non-empty MTMS_VERBOSE
// other than "0".
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mtms::cli
