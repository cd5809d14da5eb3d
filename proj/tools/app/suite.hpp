#pragma once

#include <string>
#include <vector>

#include "app/report.hpp"
#include "app/run_config.hpp"

namespace kahlerlab::app {

struct CriterionOutcome {
  int id = 0;
  std::string title;
  bool pass = false;
  double seconds = 0.0;
};

struct SuiteOutcome {
  Report report;
  std::vector<CriterionOutcome> criteria;
};

/// Titles of acceptance criteria 1..10.
const std::vector<std::string>& criterion_titles();

/// Criterion numbers selected by `only` (all ten when empty), sorted.
std::vector<int> selected_criteria(const RunConfig& cfg);

/// Runs the selected criteria; criterion 10 reruns the others and compares exact-field hashes
/// and numeric results.
SuiteOutcome run_battery(const RunConfig& cfg);

}  // namespace kahlerlab::app
