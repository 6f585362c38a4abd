#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace mdbg::acceptance {

enum class Status { pass, fail, skip };

struct CriterionResult {
  int id = 0;
  std::string name;
  Status status = Status::fail;
  std::string detail;
  double seconds = 0.0;
};

struct Options {
  /// Directory holding ETTh1.csv, ETTh2.csv, ETTm1.csv and ETTm2.csv.
  std::filesystem::path ett_dir;
};

std::vector<int> criterion_ids();
CriterionResult run_criterion(int id, const Options& options);

/// One line: "[PASS] 3 construction oracle: ... (0.41 s)".
std::string format(const CriterionResult& r);

}  // namespace mdbg::acceptance
