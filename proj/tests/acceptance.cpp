// Runs the acceptance checks and prints one PASS/FAIL line per criterion.
// Arguments select criteria by number; none runs all nine.

#include <cstdlib>
#include <iostream>
#include <set>

#include "crystalcool/verify.hpp"

int main(int argc, char** argv) {
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  crystalcool::VerifyOptions options;
  int failed = 0;
  for (const auto& check : crystalcool::acceptance_checks()) {
    if (!wanted.empty() && !wanted.count(check.id)) continue;
    const auto r = crystalcool::run_check(check, options);
    std::cout << crystalcool::format_result(r) << std::endl;
    if (!r.passed) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
