#pragma once

// kq-representation on a grid commensurate with alpha = sqrt(2 pi L): the
// discrete Zak transform, up/down position representations, kq coefficient
// maps of the Psi and Phi families, translation actions and the momentum
// representation.

#include <cstdint>

#include "pbx/fock.hpp"
#include "pbx/pseudoboson.hpp"
#include "pbx/report.hpp"

namespace pbx {

struct ZakParams {
  int L = 1;
  double alpha = 0.0;
  Index Q = 64;   // samples of q in [0, alpha)
  Index Kk = 64;  // samples of k in [0, alpha)
  Index n_window = 1;

  /// alpha = sqrt(2 pi L); validates.
  static ZakParams make(int L, Index Q, Index Kk, Index n_window);
  /// ceil(L_x / alpha) + 1 with L_x = sqrt(2 dim) + 4.
  static Index default_window(int L, Index dim);

  /// alpha^2 = 2 pi L, Q, Kk >= 8, L | Kk and 2 n_window + 1 <= Kk / L (so
  /// that every translate has its own k-frequency and the inverse is exact).
  void validate() const;

  double spacing() const { return alpha / double(Q); }
  double k(Index i) const { return double(i) * alpha / double(Kk); }
  double q(Index j) const { return double(j) * spacing(); }
};

/// x_m = -n_window alpha + m alpha/Q, m = 0 .. (2 n_window + 1) Q - 1.
PositionGrid zak_grid(const ZakParams& params);

/// values(i, j) = h(k_i, q_j).
struct ZakArray {
  ZakParams params;
  Eigen::MatrixXcd values;
};

/// h(k_i, q_j) = alpha^{-1/2} sum_n e^{-i k_i n alpha} H(q_j + n alpha), one FFT
/// over n per q column. The grid must have spacing alpha/Q, sample points on
/// integer multiples of it and cover the window.
ZakArray zak_forward(const GridFunction& H, const ZakParams& params);

/// H(q_j + n alpha) = (sqrt(alpha)/Kk) sum_i e^{i k_i n alpha} h(k_i, q_j) on zak_grid.
GridFunction zak_inverse(const ZakArray& h);

/// Defining sum at an arbitrary k and q = m alpha/Q (m any integer); grid
/// points outside H's grid count as zero.
cplx zak_sample(const GridFunction& H, const ZakParams& params, double k, Index m);

enum class Direction { up, down };

/// up: grid values of S^{-1} f; down: grid values of S f.
GridFunction updown_transform(const PseudoBosonSystem& sys, const StateVector& f,
                              Direction direction, const PositionGrid& grid);

enum class KqFamily { Psi, Phi };

/// Psi: <Psi_kq, f> = Z[f_up]; Phi: <Phi_kq, f> = Z[f_down].
ZakArray kq_coefficients(const PseudoBosonSystem& sys, const StateVector& f, KqFamily family,
                         const ZakParams& params);

/// t1_action, t2_action: T1 f and T2 f (factorized forms) read in the up
/// representation against e^{i alpha x} f_up(x) and f_up(x - alpha), away from a
/// band of width alpha at both grid ends. kq_t1_psi, kq_t2_psi, kq_t1dag_phi,
/// kq_t2dag_phi: the corresponding phase factors on kq coefficients.
StructureReport translation_action_check(const PseudoBosonSystem& sys, const StateVector& f,
                                         const ZakParams& params);

/// Continuous Fourier transform (kernel e^{-ipx}/sqrt(2 pi)) of grid values,
/// by FFT onto p_m = (m - floor(M/2)) 2 pi / (M h).
GridFunction fourier_transform(const GridFunction& g);

/// Fourier transform of f_up (<theta^p, f>) or f_down (<theta_p, f>).
GridFunction momentum_transform(const PseudoBosonSystem& sys, const StateVector& f,
                                Direction direction, const PositionGrid& grid);

/// Whittaker-Shannon interpolation of g onto another grid.
GridFunction bandlimited_resample(const GridFunction& g, const PositionGrid& target);

/// h sum_m conj(a_m) b_m.
cplx grid_inner(const GridFunction& a, const GridFunction& b);

struct ZakSuiteOptions {
  std::uint64_t seed = 0;
  Index n_modes = 8;  // probe support
};

/// Round trip, Parseval, quasi-periodicity, translation actions, kq Parseval
/// across families, up/down pairing, S_eta relations, the S^2 norm bound and
/// the momentum representation. Regular systems only.
StructureReport zak_suite(const PseudoBosonSystem& sys, const ZakParams& params,
                          const ZakSuiteOptions& options = {});

}  // namespace pbx
