#pragma once

#include <ostream>

#include "config.hpp"
#include "report.hpp"

namespace qwave::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFail = 2;

/// Computes the command into `out`. Throws ConfigError (or a library
/// ParameterError, ContractError, SizeError, LoadError) for invalid input;
/// rows already produced stay in `out`.
void execute(const RunConfig& cfg, Outcome& out);

/// execute + write_outputs. Returns 0 when every check passes, 2 when one
/// fails, 1 on invalid input; partial results are written flagged incomplete.
int run(const RunConfig& cfg, std::ostream& log);

}  // namespace qwave::cli
