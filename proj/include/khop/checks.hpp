#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace khop {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

struct CheckOptions {
  unsigned threads = 0;  // 0: hardware concurrency
};

inline constexpr int kCriterionCount = 10;

CriterionResult run_criterion(int id, const CheckOptions& options = {});

// tables: 1 4 9, oracles: 2 3, bounds: 5, mc: 6 7 8 10, all: 1..10.
std::vector<int> suite_criteria(std::string_view suite);

// "criterion <id> <PASS|FAIL> <title> (<seconds>s): <detail>"
std::string format_result(const CriterionResult& r);

}  // namespace khop
