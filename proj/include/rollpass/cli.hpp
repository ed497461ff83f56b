#pragma once

namespace rollpass::cli {

// Full command-line entry point. Exit codes: 0 success, 1 usage error,
// 2 runtime error (message on stderr). Every subcommand logs its resolved
// configuration to stderr and is a pure function of (argv, input files).
int run(int argc, const char* const* argv);

}  // namespace rollpass::cli
