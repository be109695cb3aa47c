// Runs every acceptance criterion; exit status 0 iff all pass.

#include <iostream>

#include "pdmlab/acceptance.hpp"

int main() {
  const auto results = pdmlab::run_acceptance({}, std::cout);
  std::size_t passed = 0;
  for (const auto& r : results) passed += r.passed ? 1 : 0;
  std::cout << passed << "/" << results.size() << " criteria passed\n";
  return passed == results.size() ? 0 : 1;
}
