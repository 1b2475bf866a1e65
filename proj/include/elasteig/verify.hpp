#pragma once

#include <string>
#include <vector>

namespace elasteig {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Names of all checks in execution order.
std::vector<std::string> verify_check_names();

/// Runs every check. The check called `inject_fault` (if any) receives
/// corrupted input. Throws InputError for an unknown fault name.
std::vector<CheckResult> run_verify(const std::string& inject_fault = "");

} // namespace elasteig
