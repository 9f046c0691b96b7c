#pragma once

#include <string>
#include <vector>

namespace mayerkit::verify {

// One acceptance check: pinned inputs, pinned tolerance, no knobs.  The
// details vector holds one line per sub-check ("ok   ..." / "FAIL ...").
struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::vector<std::string> details;
  double seconds = 0.0;
};

// ids 1..9; throws config_error for anything else.
CriterionResult run_criterion(int id, int workers = 4);

// counts {5}, thresholds {1,2}, oracles {3,4}, cumulants {6},
// branching {7,8}, invariants {9}, all {1..9}.
std::vector<int> suite_criteria(const std::string& suite);

struct SuiteResult {
  std::vector<CriterionResult> results;
  bool all_passed = true;
};

// Runs a suite in order, printing one [PASS]/[FAIL] line per criterion plus
// the indented sub-check lines to stdout.
SuiteResult run_suite(const std::string& suite, int workers = 4);

}  // namespace mayerkit::verify
