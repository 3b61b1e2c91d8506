#pragma once

namespace fungrasp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotConverged = 2;

/// Entry point shared by the executable and the tests.
int run(int argc, char** argv);

}  // namespace fungrasp::cli
