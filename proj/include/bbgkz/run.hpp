#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>

#include "bbgkz/problem.hpp"

namespace bbgkz {

struct RunOptions {
  std::optional<std::set<Task>> tasks;  // overrides the problem file
  std::optional<std::uint64_t> seed;    // overrides x.seed
  std::optional<Index> truncation;      // overrides the problem file
  bool timings = true;
};

enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitCheckFailed = 3 };

struct RunResult {
  Json report;
  int exit_code = kExitOk;
};

/// Runs the requested tasks and assembles the report. Library errors are
/// caught and recorded under "error"; the exit code follows the CLI contract.
RunResult run_problem(const ProblemSpec& problem, const RunOptions& options);

/// Writes through a temporary file in the same directory and renames it.
void write_file_atomically(const std::string& path, const std::string& contents);

}  // namespace bbgkz
