#pragma once

// Coherent and bi-coherent states, displacement operators, the disc
// resolution of the identity, and the Weyl factorizations of e^{i alpha x}
// and e^{-i alpha p}.

#include <cstdint>
#include <string>
#include <vector>

#include "pbx/fock.hpp"
#include "pbx/pseudoboson.hpp"
#include "pbx/quadrature.hpp"
#include "pbx/report.hpp"

namespace pbx {

struct CoherentState {
  StateVector coeffs;
  double tail_bound = 0.0;  // e^{-|z|^2/2} sum_{k>=dim} |z|^k / sqrt(k!)
  std::vector<std::string> warnings;
};

/// Phi(z) = W(z) e_0 truncated to dim coordinates.
CoherentState standard_coherent(cplx z, Index dim);

enum class Route { series, s_transform };

struct BiCoherentPair {
  cplx z;
  StateVector phi_z;
  StateVector psi_z;
  double series_truncation_error = 0.0;
  Route route = Route::series;
  std::vector<std::string> warnings;
};

BiCoherentPair bicoherent_pair(const PseudoBosonSystem& sys, cplx z, Route route = Route::series);

enum class Displacement { W, U, V };

/// W(z) = exp(z c^dag - conj(z) c).
FockMatrix displacement_matrix(Index dim, cplx z);
/// W, U(z) = exp(z b - conj(z) a) or V(z) = exp(z a^dag - conj(z) b^dag).
FockMatrix displacement_matrix(const PseudoBosonSystem& sys, cplx z, Displacement which);

struct EigenResiduals {
  double r1 = 0.0;  // ||a phi(z) - z phi(z)|| on the safe block
  double r2 = 0.0;  // ||b^dag Psi(z) - z Psi(z)|| on the safe block
  double r3 = 0.0;  // |<phi(z), Psi(z)> - 1|
};

EigenResiduals eigen_residuals(const PseudoBosonSystem& sys, const BiCoherentPair& pair);

struct ResolutionResult {
  cplx value;
  cplx exact;
  double error = 0.0;
  std::vector<std::string> warnings;
};

/// (1/pi) sum_j w_j <f, phi(z_j)> <Psi(z_j), g> over the disc nodes.
ResolutionResult resolution_quadrature(const PseudoBosonSystem& sys, const StateVector& f,
                                       const StateVector& g, const DiscQuadrature& quad);

/// T1 = e^{i alpha x} and T2 = e^{-i alpha p} as
///   e^{-alpha^2/4} e^{i alpha b/sqrt2} e^{i alpha a/sqrt2},
///   e^{-alpha^2/4} e^{alpha b/sqrt2} e^{-alpha a/sqrt2}.
/// Passing -alpha gives the factorized inverses.
FockMatrix t1_factorized(const PseudoBosonSystem& sys, double alpha);
FockMatrix t2_factorized(const PseudoBosonSystem& sys, double alpha);
/// Direct exponentials of i alpha x and -i alpha p.
FockMatrix t1_direct(const PseudoBosonSystem& sys, double alpha);
FockMatrix t2_direct(const PseudoBosonSystem& sys, double alpha);

struct WeylOptions {
  Index n_modes = 16;  // columns compared
  Index n_sigma = 4;   // sigma_2 series checked for n = 0..n_sigma
  std::uint64_t seed = 0;
};

/// weyl_t1, weyl_t2: factorized vs direct on safe rows and the first n_modes
/// columns; weyl_adjoint_pairing: <e^{-i alpha x^dag} g, f> vs <g, e^{i alpha x} f>;
/// sigma2_series: e^{gamma b} phi_n against the explicit series, gamma = i alpha/sqrt2.
StructureReport weyl_factorization_check(const PseudoBosonSystem& sys, double alpha,
                                         const WeylOptions& options = {});

/// <T1 f, T2^dag g> - <T2 f, T1^dag g> over random probes on the first n_modes
/// modes, using the factorized T1, T2. Vanishes when alpha^2 = 2 pi L.
StructureReport commutation_check(const PseudoBosonSystem& sys, double alpha,
                                  const WeylOptions& options = {});

}  // namespace pbx
