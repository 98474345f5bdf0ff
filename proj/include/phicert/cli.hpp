#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "phicert/json_io.hpp"

namespace phicert::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kVerdictFailure = 2 };

struct JobOptions {
  int workers = 1;
  std::uint64_t seed = 0;
  bool paper_sign = false;
};

struct JobOutcome {
  int exit_code;
  json report;
};

// Validates and executes one job document {"command", "params", "out"?}. Input problems
// are reported in the outcome (exit code 1) rather than thrown.
JobOutcome run_job(const json& job, const JobOptions& options);

// Full command-line entry point: parses flags, reads the job file, writes the report.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

// Writes `text` to `path` through a temporary file and a rename.
void write_atomically(const std::string& path, const std::string& text);

}  // namespace phicert::cli
