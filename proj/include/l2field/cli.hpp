#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "l2field/report.hpp"

namespace l2field {

/// Exit codes: all checks pass, some check fails, usage or configuration error.
inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

const std::vector<std::string>& cli_commands();

struct CliResult {
  int exit_code = kExitUsage;
  json bundle;  // {"command", "config", "reports", "pass"} or {"error"}
};

/// Runs one command from a parsed config (with "command" set). Artifacts go to
/// out_dir when it is non-empty. Never throws; errors map onto exit codes.
CliResult execute(const json& config, const std::string& out_dir, std::ostream& log, bool quiet);

/// Full command line: [command] --config <path> --seed <u64> --out <dir> --quiet.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace l2field
