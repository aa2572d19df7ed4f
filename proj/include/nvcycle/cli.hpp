#pragma once

// Command-line front-end: simulate, analyze, rate, fit, modes.
// Exit codes: 0 success, 1 runtime failure, 2 configuration/parse failure,
// 3 fit non-convergence under --strict.

namespace nvcycle {

int run_cli(int argc, const char* const* argv);

}  // namespace nvcycle
