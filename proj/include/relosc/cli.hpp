#pragma once

#include <string>
#include <vector>

namespace relosc {

/// Parses a grid spec "lo:hi:count:log" or "lo:hi:count:lin" into a sorted
/// positive grid. Throws std::invalid_argument on malformed specs.
std::vector<double> parse_lambda_grid(const std::string& spec);

/// Batch entry point. Subcommands: check, minimize, scan, find-two, verify,
/// shoot, wellposed, report. Returns the process exit status: 0 on success,
/// 1 on a mathematical failure (falsified hypothesis, failed certificate,
/// non-convergence), 2 on usage errors.
int run_cli(int argc, const char* const* argv);

}  // namespace relosc
