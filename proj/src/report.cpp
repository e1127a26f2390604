#include "pbx/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pbx {

double ToleranceProfile::tolerance(const std::string& name) const {
  if (auto it = per_check.find(name); it != per_check.end()) return it->second;
  // "section.check" falls back to the bare check name.
  if (auto dot = name.rfind('.'); dot != std::string::npos)
    if (auto it = per_check.find(name.substr(dot + 1)); it != per_check.end()) return it->second;
  return fallback;
}

ToleranceProfile ToleranceProfile::defaults() {
  ToleranceProfile p;
  p.fallback = 1e-8;
  p.per_check = {
      // pass/fail flags recorded as 0 or 1
      {"theta_positivity", 0.5},
      {"prop2_bound", 0.5},
      {"exponential_rank", 0.5},
      {"lattice_verdict_phi", 0.5},
      {"lattice_verdict_psi", 0.5},
      {"window_monotone", 0.5},
      {"duality", 0.5},
      // bi-coherent states
      {"bcs_r1", 1e-7},
      {"bcs_r2", 1e-7},
      {"bcs_r3", 1e-7},
      {"route_consistency", 1e-8},
      {"resolution", 1e-5},
      {"weyl_t1", 1e-7},
      {"weyl_t2", 1e-7},
      // kq engine
      {"zak_round_trip", 1e-10},
      {"zak_parseval", 1e-9},
      {"zak_quasi_periodicity", 1e-10},
      {"t1_action", 1e-5},
      {"t2_action", 1e-5},
      {"kq_t1_psi", 1e-6},
      {"kq_t2_psi", 1e-6},
      {"kq_t1dag_phi", 1e-6},
      {"kq_t2dag_phi", 1e-6},
      {"kq_parseval", 1e-7},
      {"updown_pairing", 1e-8},
      {"s_eta", 1e-9},
      {"momentum_eigen", 1e-6},
      {"momentum_parseval", 1e-7},
      // lattice
      {"displacement_factorization", 1e-6},
  };
  return p;
}

void StructureReport::record(const std::string& name, double deviation) {
  if (!std::isfinite(deviation)) deviation = std::numeric_limits<double>::infinity();
  deviation = std::abs(deviation);
  auto [it, inserted] = deviations.emplace(name, deviation);
  if (!inserted) it->second = std::max(it->second, deviation);
}

double StructureReport::at(const std::string& name) const {
  auto it = deviations.find(name);
  if (it == deviations.end()) throw std::out_of_range("no check named '" + name + "'");
  return it->second;
}

void StructureReport::merge(const StructureReport& other, const std::string& prefix) {
  for (const auto& [name, dev] : other.deviations) record(prefix + name, dev);
  notes.insert(notes.end(), other.notes.begin(), other.notes.end());
}

std::vector<CheckRecord> StructureReport::evaluate(const ToleranceProfile& profile) const {
  std::vector<CheckRecord> out;
  out.reserve(deviations.size());
  for (const auto& [name, dev] : deviations) {
    const double tol = profile.tolerance(name);
    out.push_back({name, dev, tol, dev < tol});
  }
  return out;
}

bool StructureReport::all_pass(const ToleranceProfile& profile) const {
  for (const auto& rec : evaluate(profile))
    if (!rec.pass) return false;
  return true;
}

}  // namespace pbx
