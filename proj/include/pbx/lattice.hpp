#pragma once

// von Neumann lattices z_n = (alpha/sqrt2)(n1 + i n2) of bi-coherent states:
// the displacement factorization, least-squares completeness evidence and the
// rank of the sampled exponential set on the cell.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pbx/fock.hpp"
#include "pbx/pseudoboson.hpp"

namespace pbx {

struct LatticeSpec {
  int L = 1;
  double alpha = 0.0;
  int W = 1;
  Index dim = 2;
  Index target_modes = 1;

  /// alpha = sqrt(2 pi L); validates.
  static LatticeSpec make(int L, int W, Index dim, Index target_modes);
  /// L >= 1, W >= 0, alpha^2 = 2 pi L, 1 <= target_modes <= dim/4.
  void validate() const;
  Index n_points() const { return Index(2 * W + 1) * Index(2 * W + 1); }
};

/// (2W+1)^2 points, n1 outer and n2 inner, both from -W to W.
std::vector<cplx> lattice_points(const LatticeSpec& spec);

/// Max over |n1|, |n2| <= n_max of the deviation between exp(z b - conj(z) a) at
/// z_n and (-1)^{L n1 n2} T1^{n2} T2^{n1} (factorized T1, T2), on safe rows and
/// the first n_modes columns.
double displacement_factorization_check(const PseudoBosonSystem& sys, const LatticeSpec& spec,
                                        int n_max = 2, Index n_modes = 24);

enum class LatticeFamily { phi, psi };

struct SynthesisOptions {
  LatticeFamily family = LatticeFamily::phi;
  std::optional<std::pair<int, int>> drop_point;  // (n1, n2) left out
  double tau = 1e-6;                              // relative rank threshold
};

struct LatticeReport {
  std::vector<double> singular_values;  // descending
  std::vector<double> residuals;        // ||e_m - P e_m||, m < target_modes
  std::optional<double> factorization_deviation;
  Index rank = 0;
  double rank_fraction = 0.0;  // rank / min(rows, columns)
  Index n_rows = 0;
  Index n_columns = 0;
  std::vector<std::string> warnings;

  double max_residual() const;
};

/// Columns phi(z_n) (or Psi(z_n)) by the series route, rows restricted to the
/// safe block, normalized; P projects onto the span of the left singular
/// vectors above tau * sigma_max. Throws CoverageError when there are at
/// least as many columns as safe rows.
LatticeReport synthesis_svd(const PseudoBosonSystem& sys, const LatticeSpec& spec,
                            const SynthesisOptions& options = {});

/// Max residual for each window size.
std::vector<std::pair<int, double>> window_curve(const PseudoBosonSystem& sys, LatticeSpec spec,
                                                 const std::vector<int>& windows,
                                                 const SynthesisOptions& options = {});

struct ExponentialRank {
  Index rank = 0;
  Index expected = 0;
};

/// Numerical rank (1e-8 relative) of the K^2 x K^2 matrix of samples of
/// e^{i alpha (q n2 - k n1)}, n1, n2 in [-K/2, K/2), on the K x K grid of the
/// cell; expected = K^2 / L^2. Throws SamplingAliasError unless L | K.
ExponentialRank exponential_rank(int L, Index K);

}  // namespace pbx
