#pragma once

#include "biest/config.hpp"

namespace biest {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  bool passed = true;
  std::vector<CheckResult> checks;

  void add(const std::string& name, bool ok, const std::string& detail = "");
  std::string to_json(const RunConfig& cfg) const;
};

std::vector<std::string> verify_suite_names();

/// Runs one module's invariant suite ("all" fans out to every module).
std::vector<SuiteReport> run_verify(const std::string& suite, const RunConfig& cfg);

}  // namespace biest
