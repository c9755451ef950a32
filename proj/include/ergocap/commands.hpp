#pragma once

#include "ergocap/config.hpp"

#include <iosfwd>
#include <string>

namespace ergocap {

namespace exit_code {
inline constexpr int kSuccess = 0;
inline constexpr int kConfigError = 1;
inline constexpr int kNonConvergence = 2;
inline constexpr int kVerificationFailed = 3;
}  // namespace exit_code

struct CommandOutput {
    int exit_code = exit_code::kSuccess;
    std::string csv;
    /// Human-readable diagnostics for stderr.
    std::string log;
};

/// Power prices, achieved powers and residuals for the explicit mu.
CommandOutput cmd_solve(const RunConfig& config);
/// One CSV row per (grid point, mode).
CommandOutput cmd_boundary(const RunConfig& config);
/// Analytic rates and power budgets against Monte Carlo means; exit 3 if
/// any |z| > 4.
CommandOutput cmd_verify_mc(const RunConfig& config);
/// Corrected-versus-naive rate gaps per user.
CommandOutput cmd_compare(const RunConfig& config);

/// Full command-line entry point; returns the process exit code.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

/// %.17g formatting used by every CSV column.
std::string format_number(double value);

}  // namespace ergocap
