#pragma once

#include <string>
#include <vector>

#include "flagein/einstein.hpp"

namespace flagein {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Structural and curvature invariants of one flag; none of them uses catalog values.
std::vector<CheckResult> property_checks(const FlagSpec& spec);
// Checks on the solution set: residuals, SPD, the Einstein/critical-point correspondence,
// catalog agreement and the counting bounds.
std::vector<CheckResult> solution_checks(const FlagSpec& spec);
// both of the above
std::vector<CheckResult> run_checks(const FlagSpec& spec);

}  // namespace flagein
