#pragma once

#include "starmd/harness.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace starmd {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  /// 0 when the criterion has no time limit.
  double time_limit = 0.0;
  std::string detail;
  Json metrics = Json::object();
};

struct AcceptanceOptions {
  int T = 4096;
  std::uint64_t seed = 1;
  /// Restrict to these ids; empty runs all eleven.
  std::vector<int> only;
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

/// "PASS  3  smooth Euclidean rate  slope=-1.998 ...  (2.10 s)"
std::string format_line(const CriterionResult& r);
Json to_json(const std::vector<CriterionResult>& results);

}  // namespace starmd
