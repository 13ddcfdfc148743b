#pragma once

#include <functional>
#include <string>
#include <vector>

namespace degenwave::verify {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::vector<std::string> details;  // one line per sub-check
  double seconds = 0.0;
  double time_limit = 0.0;           // seconds; 0 means unbounded
};

/// Runs criterion `id` (1-9). Each one checks its sub-properties at the
/// stated tolerances and its runtime budget.
CriterionResult run_criterion(int id);

/// Ids of the quick suite (the default of `degenwave verify`).
std::vector<int> quick_suite();
/// Ids of the full suite.
std::vector<int> full_suite();

/// Single summary line "[PASS] 3 Hardy/Poincare ... (1.2 s)".
std::string summary_line(const CriterionResult& r);

}  // namespace degenwave::verify
