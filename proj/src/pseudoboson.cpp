#include "pbx/pseudoboson.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>

#include "pbx/numeric.hpp"

namespace pbx {

namespace {

constexpr double kMinSingularValue = 1e-8;
constexpr double kLeakTolerance = 1e-12;
constexpr double kNormalizationFloor = 1e-12;

double vec_dev(const StateVector& actual, const StateVector& expected) {
  return (actual - expected).norm() / std::max(1.0, expected.norm());
}

// Largest n such that every m <= n has negligible weight at the truncation
// edge, for both families.
Index edge_safe_last(const Eigen::MatrixXcd& phi, const Eigen::MatrixXcd& psi) {
  const Index dim = phi.rows();
  const double root = std::sqrt(double(dim));
  auto leak = [&](const Eigen::MatrixXcd& m, Index n) {
    const double top = std::max(std::abs(m(dim - 1, n)), std::abs(m(dim - 2, n)));
    return root * top / std::max(m.col(n).norm(), 1e-300);
  };
  Index last = -1;
  for (Index n = 0; n < dim; ++n) {
    if (leak(phi, n) > kLeakTolerance || leak(psi, n) > kLeakTolerance) break;
    last = n;
  }
  return last;
}

}  // namespace

std::string_view to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::identity: return "identity";
    case SystemKind::diagonal_riesz: return "diagonal_riesz";
    case SystemKind::custom_matrix: return "custom_matrix";
    case SystemKind::shifted_oscillator: return "shifted_oscillator";
  }
  return "unknown";
}

SystemKind system_kind_from_string(std::string_view name) {
  if (name == "identity") return SystemKind::identity;
  if (name == "diagonal_riesz") return SystemKind::diagonal_riesz;
  if (name == "custom_matrix") return SystemKind::custom_matrix;
  if (name == "shifted_oscillator") return SystemKind::shifted_oscillator;
  throw UsageError("unknown system kind '" + std::string(name) + "'");
}

SystemSpec SystemSpec::identity(Index dim) {
  SystemSpec spec;
  spec.kind = SystemKind::identity;
  spec.dim = dim;
  return spec;
}

SystemSpec SystemSpec::diagonal_riesz(Eigen::VectorXd s) {
  SystemSpec spec;
  spec.kind = SystemKind::diagonal_riesz;
  spec.dim = s.size();
  spec.s = std::move(s);
  return spec;
}

SystemSpec SystemSpec::custom_matrix(FockMatrix s) {
  SystemSpec spec;
  spec.kind = SystemKind::custom_matrix;
  spec.dim = s.rows();
  spec.custom = std::move(s);
  return spec;
}

SystemSpec SystemSpec::shifted_oscillator(Index dim, cplx alpha_sh, cplx beta_sh) {
  SystemSpec spec;
  spec.kind = SystemKind::shifted_oscillator;
  spec.dim = dim;
  spec.alpha_sh = alpha_sh;
  spec.beta_sh = beta_sh;
  return spec;
}

void SystemSpec::validate() const {
  require_dim(dim);
  switch (kind) {
    case SystemKind::identity:
      break;
    case SystemKind::diagonal_riesz: {
      if (s.size() != dim)
        throw InvalidDimensionError("diagonal_riesz: expected " + std::to_string(dim) +
                                    " values s_n, got " + std::to_string(s.size()));
      if (!s.allFinite()) throw NumericInputError("diagonal_riesz: non-finite s_n");
      const double lo = s.minCoeff();
      const double hi = s.maxCoeff();
      if (!(lo > 0.0))
        throw ConstructionError("Riesz lower bound violated: need 0 < s_min <= s_n, found s_n = " +
                                    std::to_string(lo),
                                std::numeric_limits<double>::infinity());
      if (s_min && (!(*s_min > 0.0) || lo < *s_min))
        throw ConstructionError("Riesz lower bound violated: s_n = " + std::to_string(lo) +
                                    " below stated s_min = " + std::to_string(*s_min),
                                hi / lo);
      if (s_max && hi > *s_max)
        throw ConstructionError("Riesz upper bound violated: s_n = " + std::to_string(hi) +
                                    " above stated s_max = " + std::to_string(*s_max),
                                hi / lo);
      break;
    }
    case SystemKind::custom_matrix: {
      if (custom.rows() != dim || custom.cols() != dim)
        throw InvalidDimensionError("custom_matrix: S must be " + std::to_string(dim) + "x" +
                                    std::to_string(dim));
      if (!custom.allFinite()) throw NumericInputError("custom_matrix: non-finite entries");
      Eigen::JacobiSVD<FockMatrix> svd(custom);
      const auto& sv = svd.singularValues();
      const double cond = sv(0) / sv(sv.size() - 1);
      if (!(sv(sv.size() - 1) > kMinSingularValue))
        throw ConstructionError("custom_matrix: smallest singular value " +
                                    std::to_string(sv(sv.size() - 1)) + " <= 1e-8 (condition " +
                                    std::to_string(cond) + ")",
                                cond);
      break;
    }
    case SystemKind::shifted_oscillator:
      if (!std::isfinite(alpha_sh.real()) || !std::isfinite(alpha_sh.imag()) ||
          !std::isfinite(beta_sh.real()) || !std::isfinite(beta_sh.imag()))
        throw NumericInputError("shifted_oscillator: non-finite shift");
      break;
  }
}

PseudoBosonSystem build_system(const SystemSpec& spec) {
  spec.validate();
  const Index dim = spec.dim;
  const auto [c, c_dag] = ladder_matrices<double>(dim);
  const FockMatrix id = FockMatrix::Identity(dim, dim);

  PseudoBosonSystem sys;
  sys.spec = spec;

  if (spec.regular()) {
    FockMatrix S = id;
    FockMatrix S_inv = id;
    switch (spec.kind) {
      case SystemKind::identity:
        break;
      case SystemKind::diagonal_riesz:
        S = spec.s.cast<cplx>().asDiagonal();
        S_inv = spec.s.cwiseInverse().cast<cplx>().asDiagonal();
        sys.condition_number = spec.s.maxCoeff() / spec.s.minCoeff();
        break;
      case SystemKind::custom_matrix: {
        // Polar decomposition S = U P; P = V Sigma V^dag is the self-adjoint
        // positive factor with the same Theta = (S^dag S)^{-1}.
        Eigen::JacobiSVD<FockMatrix> svd(spec.custom, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Eigen::VectorXd sv = svd.singularValues();
        const FockMatrix& V = svd.matrixV();
        S = V * sv.cast<cplx>().asDiagonal() * V.adjoint();
        S_inv = V * sv.cwiseInverse().cast<cplx>().asDiagonal() * V.adjoint();
        sys.condition_number = sv(0) / sv(sv.size() - 1);
        if ((spec.custom - S).cwiseAbs().maxCoeff() > 1e-12 * sv(0))
          sys.notes.push_back("custom S replaced by the positive factor of its polar decomposition");
        break;
      }
      case SystemKind::shifted_oscillator:
        break;
    }
    sys.a = S * c * S_inv;
    sys.b = S * c_dag * S_inv;
    sys.phi = S;
    sys.psi = S_inv;
    sys.theta = S_inv * S_inv;
    sys.S = std::move(S);
    sys.S_inv = std::move(S_inv);
    sys.safe_margin = spec.kind == SystemKind::custom_matrix ? std::max<Index>(2, dim / 4) : 2;
    sys.safe_margin = std::min(sys.safe_margin, dim - 1);
  } else {
    sys.a = c + spec.alpha_sh * id;
    sys.b = c_dag + std::conj(spec.beta_sh) * id;

    StateVector phi0 = coherent_coefficients<double>(-spec.alpha_sh, dim);
    phi0 /= phi0.norm();
    // b^dag = c + beta, so Psi_0 is proportional to Phi(-beta).
    const StateVector v = coherent_coefficients<double>(-spec.beta_sh, dim);
    const cplx overlap = phi0.dot(v);
    if (!(std::abs(overlap) > kNormalizationFloor))
      throw NormalizationError("shifted_oscillator: <phi_0, Psi_0> numerically zero (|overlap| = " +
                               std::to_string(std::abs(overlap)) + ")");
    const StateVector psi0 = v / overlap;

    const FockMatrix a_dag = sys.a.adjoint();
    sys.phi.resize(dim, dim);
    sys.psi.resize(dim, dim);
    sys.phi.col(0) = phi0;
    sys.psi.col(0) = psi0;
    for (Index n = 1; n < dim; ++n) {
      const double inv = 1.0 / std::sqrt(double(n));
      sys.phi.col(n) = (sys.b * sys.phi.col(n - 1)) * inv;
      sys.psi.col(n) = (a_dag * sys.psi.col(n - 1)) * inv;
    }

    const Index last = edge_safe_last(sys.phi, sys.psi);
    if (last < 1) {
      sys.safe_margin = dim - 1;
      sys.notes.push_back("truncation edge reached already by phi_0/Psi_0; increase dim");
    } else {
      sys.safe_margin = std::max<Index>(2, dim - 1 - last);
    }
  }

  sys.number_op = sys.b * sys.a;
  return sys;
}

FockMatrix position_operator(const PseudoBosonSystem& sys) {
  return (sys.a + sys.b) / std::numbers::sqrt2;
}

FockMatrix momentum_operator(const PseudoBosonSystem& sys) {
  return (sys.a - sys.b) * cplx(0.0, -1.0 / std::numbers::sqrt2);
}

void require_regular(const PseudoBosonSystem& sys, std::string_view operation) {
  if (!sys.regular())
    throw UnsupportedSystemError(std::string(operation) + " requires a regular system (kind " +
                                 std::string(to_string(sys.spec.kind)) + " has no S)");
}

StructureReport verify_structure(const PseudoBosonSystem& sys, const VerifyOptions& options) {
  StructureReport report;
  const Index dim = sys.dim();
  const Index last = sys.safe_last();
  const FockMatrix a_dag = sys.a.adjoint();
  const FockMatrix b_dag = sys.b.adjoint();
  const FockMatrix n_dag = sys.number_op.adjoint();
  const FockMatrix comm = sys.a * sys.b - sys.b * sys.a - FockMatrix::Identity(dim, dim);
  const StateVector zero = StateVector::Zero(dim);

  report.record("normalization", std::abs(sys.phi.col(0).dot(sys.psi.col(0)) - 1.0));

  for (Index n = 0; n <= last; ++n) {
    const StateVector phi_n = sys.phi.col(n);
    const StateVector psi_n = sys.psi.col(n);
    const double rn = std::sqrt(double(n));
    if (n < last) {
      const double rn1 = std::sqrt(double(n + 1));
      report.record("ladder_b_phi", vec_dev(sys.b * phi_n, rn1 * sys.phi.col(n + 1)));
      report.record("ladder_adag_psi", vec_dev(a_dag * psi_n, rn1 * sys.psi.col(n + 1)));
    }
    report.record("ladder_a_phi",
                  vec_dev(sys.a * phi_n, n == 0 ? zero : StateVector(rn * sys.phi.col(n - 1))));
    report.record("ladder_bdag_psi",
                  vec_dev(b_dag * psi_n, n == 0 ? zero : StateVector(rn * sys.psi.col(n - 1))));
    report.record("number_phi", vec_dev(sys.number_op * phi_n, double(n) * phi_n));
    report.record("number_psi", vec_dev(n_dag * psi_n, double(n) * psi_n));
    report.record("commutator", (comm * phi_n).norm() / phi_n.norm());
  }

  const Index block = last + 1;
  const Eigen::MatrixXcd gram = sys.phi.leftCols(block).adjoint() * sys.psi.leftCols(block);
  report.record("biorthogonality",
                (gram - Eigen::MatrixXcd::Identity(block, block)).cwiseAbs().maxCoeff());

  if (sys.regular()) {
    const FockMatrix& S = *sys.S;
    const FockMatrix& S_inv = *sys.S_inv;
    const FockMatrix& theta = *sys.theta;
    const FockMatrix theta_inv = S * S;

    for (Index n = 0; n <= last; ++n)
      report.record("theta_conjugation", vec_dev(theta * sys.phi.col(n), sys.psi.col(n)));

    const FockMatrix intertwined = theta_inv * b_dag * theta;
    report.record("theta_intertwining",
                  scaled_deviation(intertwined.topLeftCorner(block, block),
                                   sys.a.topLeftCorner(block, block)));
    report.record("theta_hermitian", (theta - theta.adjoint()).cwiseAbs().maxCoeff());

    ProbeRng rng(options.seed);
    double min_ratio = std::numeric_limits<double>::infinity();
    for (int p = 0; p < options.n_probes; ++p) {
      const StateVector f = rng.vector(dim, dim);
      min_ratio = std::min(min_ratio, f.dot(theta * f).real() / f.squaredNorm());
    }
    report.record("theta_positivity", min_ratio > 0.0 ? 0.0 : 1.0);
    report.notes.push_back("theta_min_probe_ratio=" + std::to_string(min_ratio));

    const FockMatrix lowered = S_inv * sys.a * S;
    const FockMatrix raised = S_inv * sys.b * S;
    const FockMatrix id = FockMatrix::Identity(dim, dim);
    for (Index n = 0; n <= last; ++n) {
      const StateVector expect_low =
          n == 0 ? zero : StateVector(std::sqrt(double(n)) * id.col(n - 1));
      report.record("similarity_lowering", vec_dev(lowered.col(n), expect_low));
      if (n < last)
        report.record("similarity_raising",
                      vec_dev(raised.col(n), std::sqrt(double(n + 1)) * id.col(n + 1)));
    }

    // b^n phi_0 / sqrt(n!) against S e_n, and (a^dag)^n Psi_0 / sqrt(n!) against S^-1 e_n.
    StateVector rec_phi = sys.phi.col(0);
    StateVector rec_psi = sys.psi.col(0);
    for (Index n = 0; n <= last; ++n) {
      if (n > 0) {
        const double inv = 1.0 / std::sqrt(double(n));
        rec_phi = (sys.b * rec_phi) * inv;
        rec_psi = (a_dag * rec_psi) * inv;
      }
      report.record("eq_a2_consistency", vec_dev(rec_phi, S.col(n)));
      report.record("eq_a2_consistency", vec_dev(rec_psi, S_inv.col(n)));
    }
  }

  report.notes.push_back("safe_last=" + std::to_string(last));
  return report;
}

std::vector<double> quasi_basis_residual(const PseudoBosonSystem& sys, const StateVector& f,
                                         const StateVector& g, Index K) {
  if (K < 1 || K > sys.dim())
    throw RangeError("quasi_basis_residual: K must be in [1, " + std::to_string(sys.dim()) +
                     "], got " + std::to_string(K));
  if (f.size() != sys.dim() || g.size() != sys.dim())
    throw InvalidDimensionError("quasi_basis_residual: vector size mismatch");
  const cplx exact = f.dot(g);
  std::vector<double> out;
  out.reserve(std::size_t(K));
  cplx partial = 0.0;
  for (Index n = 0; n < K; ++n) {
    partial += f.dot(sys.phi.col(n)) * sys.psi.col(n).dot(g);
    out.push_back(std::abs(exact - partial));
  }
  return out;
}

NormGrowthFit norm_growth_fit(const PseudoBosonSystem& sys) {
  if (sys.dim() < 8)
    throw InvalidDimensionError("norm_growth_fit needs dim >= 8, got " + std::to_string(sys.dim()));
  const Index count = sys.safe_size();
  if (count < 3) throw DegenerateFitError("norm_growth_fit: safe block too small for a fit");

  Eigen::MatrixXd design(count, 2);
  for (Index n = 0; n < count; ++n) {
    design(n, 0) = double(n);
    design(n, 1) = std::lgamma(double(n) + 1.0);
  }
  auto fit = [&](const Eigen::MatrixXcd& family) {
    Eigen::VectorXd y(count);
    for (Index n = 0; n < count; ++n) {
      const double norm = family.col(n).norm();
      if (!(norm > 0.0) || !std::isfinite(norm))
        throw DegenerateFitError("norm_growth_fit: zero or non-finite vector at n=" +
                                 std::to_string(n));
      y(n) = std::log(norm);
    }
    const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(y);
    return std::pair{std::exp(coef(0)), coef(1)};
  };
  NormGrowthFit out;
  std::tie(out.r_phi, out.alpha_phi) = fit(sys.phi);
  std::tie(out.r_psi, out.alpha_psi) = fit(sys.psi);
  out.admissible_phi = out.alpha_phi < 0.5;
  out.admissible_psi = out.alpha_psi < 0.5;
  return out;
}

}  // namespace pbx
