#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ghof::repro {

struct CriterionResult {
  std::string name;
  bool pass = false;
  std::string details;
  double seconds = 0.0;
};

// Names of the acceptance criteria, in run order.
std::vector<std::string> criterion_names();

// Runs one criterion end to end with its pinned seeds and tolerances.
// Exceptions inside a criterion are converted to a failing result; unknown
// names throw validation_error listing the available suites.
CriterionResult run_criterion(const std::string& name);

// Runs the named suite ("all" or a single criterion), printing one pass/fail
// line per criterion to `out`. Returns the number of failed criteria.
int run_suite(const std::string& name, std::ostream& out);

}  // namespace ghof::repro
