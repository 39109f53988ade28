#pragma once

#include <string>
#include <vector>

namespace psd::selfcheck {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Suite names in run order.
const std::vector<std::string>& suite_names();

// Runs the suites in order and stops after the first failure. Exceptions
// inside a suite count as its failure.
std::vector<SuiteResult> run();

}  // namespace psd::selfcheck
