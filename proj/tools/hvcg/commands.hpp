#pragma once

#include "hvcg/expr.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hvcg::cli {

inline constexpr const char* kReportSchema = "hvcg-report/1";

enum ExitCode { kProved = 0, kUnproved = 1, kMalformed = 2 };

struct RunConfig {
  std::string command;  // verify, refine, simulate, vcs
  std::vector<std::string> files;
  std::map<std::string, std::string> params;                          // --param name=val
  std::map<std::string, std::pair<std::string, std::string>> bounds;  // --bounds var=lo:hi
  std::optional<long long> budget;
  int jobs = 1;
  std::uint64_t seed = 1;
  int runs = 1000;       // simulate
  int star_bound = 5;    // simulate: loop iterations drawn from [0, star_bound]
  std::string trajectory;  // simulate: CSV path
};

struct CommandResult {
  int exit_code = kProved;
  nlohmann::ordered_json report;
};

/// Runs one command over all input files. The exit code is the worst
/// over the files. The report is byte-identical for a fixed seed,
/// independent of the job count.
CommandResult run_command(const RunConfig& config);

/// Post-state check used by simulate: atoms compared with absolute slack
/// tol * max(1, |lhs|, |rhs|) in the lenient direction.
bool holds_with_tolerance(const Pred& p, const Values& vars, const Values& params, double tol);

} // namespace hvcg::cli
