#pragma once

#include <atomic>
#include <iosfwd>

namespace vreason::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // a run started and something failed
inline constexpr int kExitUsage = 2;    // rejected before any model call

// Set by the SIGINT handler; long commands stop starting new work once set.
std::atomic<bool>& stop_flag();

// Entry point shared by main() and the tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vreason::cli
