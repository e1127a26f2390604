#pragma once

#include <map>
#include <string>
#include <vector>

namespace pbx {

/// Check-name -> tolerance, with a fallback for names not listed.
struct ToleranceProfile {
  double fallback = 1e-8;
  std::map<std::string, double> per_check;

  double tolerance(const std::string& name) const;
  static ToleranceProfile defaults();
};

struct CheckRecord {
  std::string name;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Maximum deviation per named check. Deviations are non-negative and finite;
/// a non-finite measurement is stored as +inf and always fails.
struct StructureReport {
  std::map<std::string, double> deviations;
  std::vector<std::string> notes;

  /// Keeps the running maximum for `name`.
  void record(const std::string& name, double deviation);
  double at(const std::string& name) const;
  bool contains(const std::string& name) const { return deviations.count(name) != 0; }
  void merge(const StructureReport& other, const std::string& prefix = "");

  std::vector<CheckRecord> evaluate(const ToleranceProfile& profile) const;
  bool all_pass(const ToleranceProfile& profile) const;
};

}  // namespace pbx
