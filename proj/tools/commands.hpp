// commands.hpp — Command dispatch for the adiael tool

#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace adiael::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;

/// Runs the tool with `args` (program name excluded). Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "start:stop:count" with count >= 1.
std::vector<double> parse_range(const std::string& spec, bool logarithmic);

/// --threads when given, otherwise the hardware concurrency capped by
/// ADIAEL_THREADS.
unsigned resolve_threads(std::optional<unsigned> flag);

} // namespace adiael::cli
