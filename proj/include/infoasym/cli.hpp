#pragma once

namespace infoasym {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitCheckFailed = 4;

/// Parses argv, runs one command and returns the process exit status.
int dispatch(int argc, char** argv);

}  // namespace infoasym
