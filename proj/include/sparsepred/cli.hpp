#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sparsepred::cli {

enum ExitCode : int { kSuccess = 0, kComputationFailure = 1, kUsageError = 2 };

// Full command line without the program name, e.g. {"table", "--eta", "0.01"}.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Parses "4", "4le" (units of lambda_e) or "9lf" (units of lambda_f).
double parse_theta_max(const std::string& text, double lambda_e, double lambda_f);

}  // namespace sparsepred::cli
