#include "shearlab/acceptance.hpp"

#include <iostream>

int main() {
  shearlab::AcceptanceOptions opt;
  opt.on_result = [](const shearlab::CriterionResult& r) {
    std::cout << shearlab::format_criterion(r) << std::endl;
  };
  int failed = 0;
  for (const auto& r : shearlab::run_acceptance_suite(opt)) failed += r.pass ? 0 : 1;
  std::cout << (shearlab::acceptance_count() - failed) << "/" << shearlab::acceptance_count() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
