// Standalone acceptance gate: one line per criterion, exit 0 only when all
// pass. The same report is reachable through `specgraph validate`.

#include <iostream>

#include "specgraph/validation.hpp"

int main() {
  specgraph::AcceptanceSuite suite;
  bool all = true;
  suite.run_all([&](const specgraph::CriterionResult& r) {
    all = all && r.pass;
    std::cout << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << ": "
              << r.name << " -- " << r.detail << std::endl;
  });
  std::cout << (all ? "acceptance: all criteria passed"
                    : "acceptance: some criteria FAILED")
            << std::endl;
  return all ? 0 : 1;
}
