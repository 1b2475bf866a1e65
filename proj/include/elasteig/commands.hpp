#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace elasteig {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitSolver = 2,
  kExitVerify = 3,
};

struct CommandOptions {
  std::optional<std::filesystem::path> out;  // overrides output.directory
  int threads = 1;
  std::optional<std::uint64_t> seed;  // overrides eigen.seed
  std::ostream* log = nullptr;        // progress and error messages; stderr when null
};

/// Single solve; writes eigenvalues.json (and K.mtx, M.mtx on request).
int cmd_solve(const std::filesystem::path& config, const CommandOptions& opts);

/// Convergence study; writes history.csv, history.json, table.csv, plot.csv.
int cmd_study(const std::filesystem::path& config, const CommandOptions& opts);

/// Runs the invariant checks. `inject_fault` names a check whose input is
/// deliberately corrupted, which must make that check fail.
int cmd_verify(const CommandOptions& opts, const std::string& inject_fault = "");

} // namespace elasteig
