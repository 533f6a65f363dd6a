#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace trackadapt {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;  // bad flags, config, paths or input files

// Entry point of the trackadapt binary. args excludes the program name.
// Tables requested without an output path go to `out`; logs go to stderr.
int run_cli(const std::vector<std::string>& args, std::ostream& out);

}  // namespace trackadapt
