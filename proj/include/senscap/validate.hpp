#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace senscap {

enum class ValidationLevel { Fast, Full };

ValidationLevel parse_validation_level(std::string_view text);

struct CheckResult {
  std::string name;
  bool passed = true;
  /// Warnings are listed but do not fail the run.
  bool warning_only = false;
  double max_deviation = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool passed() const;
  std::string to_text() const;
};

ValidationReport run_validation(ValidationLevel level);

}  // namespace senscap
