#pragma once

#include <functional>
#include <string>
#include <vector>

namespace shearlab {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  double budget = 0.0;  // seconds; exceeding it fails the criterion
};

struct AcceptanceOptions {
  std::vector<int> only;  // empty: all
  // called after each criterion, e.g. to stream the line
  std::function<void(const CriterionResult&)> on_result;
};

int acceptance_count();
CriterionResult run_criterion(int id);
std::vector<CriterionResult> run_acceptance_suite(const AcceptanceOptions& opt = {});
std::string format_criterion(const CriterionResult& r);

}  // namespace shearlab
