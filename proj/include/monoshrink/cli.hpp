#ifndef MONOSHRINK_CLI_HPP
#define MONOSHRINK_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace monoshrink::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;

/// Runs one subcommand (fit, estimate-variance, compare, simulate, blocks).
/// `args` excludes the program name. Human summaries go to `out`, diagnostics to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace monoshrink::cli

#endif  // MONOSHRINK_CLI_HPP
