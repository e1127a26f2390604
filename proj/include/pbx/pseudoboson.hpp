#pragma once

// D-pseudo-bosonic pairs (a, b) on a truncated Fock space, their biorthogonal
// families phi_n / Psi_n, and numerical checks of the ladder structure.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pbx/fock.hpp"
#include "pbx/report.hpp"

namespace pbx {

enum class SystemKind { identity, diagonal_riesz, custom_matrix, shifted_oscillator };

std::string_view to_string(SystemKind kind);
SystemKind system_kind_from_string(std::string_view name);

struct SystemSpec {
  SystemKind kind = SystemKind::identity;
  Index dim = 2;
  // diagonal_riesz
  Eigen::VectorXd s;
  std::optional<double> s_min;
  std::optional<double> s_max;
  // custom_matrix
  FockMatrix custom;
  // shifted_oscillator: a = c + alpha_sh, b = c^dag + conj(beta_sh)
  cplx alpha_sh{0.0, 0.0};
  cplx beta_sh{0.0, 0.0};

  static SystemSpec identity(Index dim);
  static SystemSpec diagonal_riesz(Eigen::VectorXd s);
  static SystemSpec custom_matrix(FockMatrix s);
  static SystemSpec shifted_oscillator(Index dim, cplx alpha_sh, cplx beta_sh);

  bool regular() const { return kind != SystemKind::shifted_oscillator; }

  /// Throws InvalidDimensionError / NumericInputError / ConstructionError with
  /// the violated invariant in the message.
  void validate() const;
};

struct PseudoBosonSystem {
  SystemSpec spec;
  FockMatrix a;
  FockMatrix b;
  // Present iff the system is regular. S is self-adjoint positive.
  std::optional<FockMatrix> S;
  std::optional<FockMatrix> S_inv;
  std::optional<FockMatrix> theta;
  // Columns are phi_n and Psi_n.
  Eigen::MatrixXcd phi;
  Eigen::MatrixXcd psi;
  FockMatrix number_op;
  Index safe_margin = 2;
  double condition_number = 1.0;
  std::vector<std::string> notes;

  Index dim() const { return a.rows(); }
  bool regular() const { return S.has_value(); }
  /// Largest index inside the safe block.
  Index safe_last() const { return dim() - 1 - safe_margin; }
  Index safe_size() const { return safe_last() + 1; }
};

PseudoBosonSystem build_system(const SystemSpec& spec);

/// (a + b)/sqrt(2) and (a - b)/(i sqrt(2)).
FockMatrix position_operator(const PseudoBosonSystem& sys);
FockMatrix momentum_operator(const PseudoBosonSystem& sys);

/// Throws UnsupportedSystemError unless the system carries S.
void require_regular(const PseudoBosonSystem& sys, std::string_view operation);

struct VerifyOptions {
  std::uint64_t seed = 0;
  int n_probes = 100;
};

/// Deviations on the safe block for: ladder relations, biorthogonality,
/// number-operator eigenrelations, the commutator, and for regular systems
/// Theta-conjugation, Theta positivity, the similarity relations with c, c^dag
/// and the consistency of b^n phi_0/sqrt(n!) with S e_n.
StructureReport verify_structure(const PseudoBosonSystem& sys, const VerifyOptions& options = {});

/// |<f,g> - sum_{n<k} <f,phi_n><Psi_n,g>| for k = 1..K.
std::vector<double> quasi_basis_residual(const PseudoBosonSystem& sys, const StateVector& f,
                                         const StateVector& g, Index K);

/// Least-squares fit of log||v_n|| = n log r + alpha log n! over the safe block.
struct NormGrowthFit {
  double r_phi = 1.0;
  double alpha_phi = 0.0;
  double r_psi = 1.0;
  double alpha_psi = 0.0;
  bool admissible_phi = true;
  bool admissible_psi = true;
};

NormGrowthFit norm_growth_fit(const PseudoBosonSystem& sys);

}  // namespace pbx
