#pragma once

// Run configuration: a YAML document with the sections system, quadrature,
// zak, lattice, bcs and tolerances. Unknown keys are rejected by name.

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "pbx/lattice.hpp"
#include "pbx/pseudoboson.hpp"
#include "pbx/quadrature.hpp"
#include "pbx/report.hpp"
#include "pbx/zak.hpp"

namespace pbx {

enum class Expectation { complete, incomplete, automatic };

struct QuadratureConfig {
  DiscQuadrature disc;
  Index max_mode = 6;  // resolution checked on <e_m, e_n>, m, n <= max_mode
};

struct LatticeConfig {
  LatticeSpec spec;
  Expectation expect = Expectation::automatic;
  std::vector<int> windows{2, 3, 4};
  double complete_threshold = 0.40;
  double incomplete_threshold = 0.1;
  int factorization_n_max = 0;  // 0: 2 for L = 1, 1 otherwise
  Index factorization_modes = 8;

  /// automatic resolves to complete for L = 1, incomplete otherwise.
  Expectation resolved() const;
  /// The non-unitary factors e^{+-alpha b/sqrt2} lose about eps e^{n^2 alpha^2/4}
  /// to cancellation, which rules out |n| = 2 in double precision once L >= 2.
  int factorization_range() const;
};

struct BcsConfig {
  double z_radius = 2.0;
  int z_grid = 5;  // z_grid x z_grid labels on the square inscribed in |z| <= z_radius
  double weyl_alpha = 0.0;  // 0 means sqrt(2 pi L) with the zak L
  Index weyl_modes = 16;
  Index sigma_n = 4;
};

struct RunConfig {
  SystemSpec system;
  Index dim = 32;
  std::uint64_t seed = 0;
  std::string output_dir = "pbx_out";
  QuadratureConfig quadrature;
  ZakParams zak;
  LatticeConfig lattice;
  BcsConfig bcs;
  ToleranceProfile tolerances = ToleranceProfile::defaults();
  std::string source_text;

  /// Normalized echo of every field, for the report.
  nlohmann::json echo() const;
};

/// Parses and validates; throws ConfigError listing every problem found.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace pbx
