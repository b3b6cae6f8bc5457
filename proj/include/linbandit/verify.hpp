#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace linbandit {

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;  // quantity under test
  double bound = 0.0;     // limit it is compared against
  std::string note;
};

std::vector<std::string> verify_suite_names();

// "geometry", "environment", "estimation", "policies", or "all"
std::vector<CheckResult> run_verify_suite(const std::string& suite, std::uint64_t seed);

}  // namespace linbandit
