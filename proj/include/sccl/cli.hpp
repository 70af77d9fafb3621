#pragma once

#include <istream>
#include <ostream>

namespace sccl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitCheck = 3;

/// Parses argv (argv[0] is the program name) and runs one subcommand.
/// `in` feeds `predict` when no --input file is given.
int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace sccl::cli
