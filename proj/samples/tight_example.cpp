// Solves the three-agent example on which the solver leaves agent 0 at exactly
// 9/8 and prints each agent's bundle and normalized cost.
#include "amms/amms.hpp"

#include <iostream>

int main() {
  const amms::Instance instance = amms::gen_paper_example();
  const amms::SolveResult result = amms::solve(instance);
  std::cout << "case: " << result.case_tag << '\n';
  for (amms::AgentId i = 0; i < instance.n(); ++i) {
    std::cout << "agent " << i << ": {";
    const auto items = result.allocation.assignment[i].to_vector();
    for (std::size_t x = 0; x < items.size(); ++x) std::cout << (x ? ", " : "") << "e" << items[x] + 1;
    std::cout << "}  cost/MMS = " << result.allocation.ratios[i] << '\n';
  }
  const auto report = amms::verify_allocation(instance, result.allocation, amms::Rational(9, 8));
  std::cout << (report.passed ? "verified at alpha = 9/8" : "verification failed: " + report.reason) << '\n';
  return report.passed ? 0 : 1;
}
