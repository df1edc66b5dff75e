#pragma once

// The nine acceptance checks, shared by the acceptance test binary and the
// reproduce-paper command.

#include <string>
#include <vector>

#include <json.hpp>

#include "vsheet/io.hpp"

namespace vsheet::acceptance {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string summary;
  nlohmann::json details;
  double seconds = 0.0;
};

inline constexpr int kCriteria = 9;

CriterionResult run_criterion(int id, const RunConfig& cfg);
std::vector<CriterionResult> run_all(const RunConfig& cfg);

/// "PASS  3  decay constant: ..." style line.
std::string format_line(const CriterionResult& r);
nlohmann::json to_json(const CriterionResult& r);

/// Published values at eps = 1e-1 ... 1e-9 for gamma = 1.
const std::vector<std::pair<double, double>>& reference_table();

}  // namespace vsheet::acceptance
