#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace pberg {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  /// Measured quantities against their thresholds.
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 42;
  /// Criterion ids to run; empty runs all 15.
  std::vector<int> only;
};

/// Titles of the criteria, indexed by id - 1.
const std::vector<std::string>& acceptance_titles();

/// Runs the acceptance criteria in id order. A criterion that throws fails
/// with the error code in its detail.
std::vector<CriterionResult> run_acceptance(
    const AcceptanceOptions& options = {},
    const std::function<void(const CriterionResult&)>& on_result = {});

/// "PASS  3  title: detail" style line.
std::string format_result(const CriterionResult& r);

}  // namespace pberg
