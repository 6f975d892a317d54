#pragma once

#include <string>
#include <vector>

namespace gelfand {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
};

struct GoldenOptions {
  /// Worker threads for the sweeps inside the suite.
  int jobs = 1;
};

/// The golden-value and property suite, one result per criterion in id
/// order. Computation errors inside a criterion mark it failed with the
/// message as detail; nothing is thrown.
std::vector<CriterionResult> run_golden_suite(const GoldenOptions& opts = {});

}  // namespace gelfand
