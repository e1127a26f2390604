#include "pbx/bicoherent.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <span>

#include "pbx/numeric.hpp"
#include "pbx/parallel.hpp"

namespace pbx {

namespace {

constexpr int kTailTerms = 200;
constexpr double kTailWarn = 1e-6;
constexpr int kPairingProbes = 8;

double tail_estimate(cplx z, Index dim) {
  const double r = std::abs(z);
  if (r == 0.0) return 0.0;
  const double log_r = std::log(r);
  const double half_norm = 0.5 * r * r;
  auto log_term = [&](Index k) {
    return double(k) * log_r - 0.5 * std::lgamma(double(k) + 1.0) - half_norm;
  };
  double sum = 0.0;
  Index k = dim;
  for (int i = 0; i < kTailTerms; ++i, ++k) sum += std::exp(log_term(k));
  // Geometric bound on what is left; the term ratio decreases in k.
  const double ratio = r / std::sqrt(double(k) + 1.0);
  if (ratio >= 1.0) return std::numeric_limits<double>::infinity();
  return sum + std::exp(log_term(k)) / (1.0 - ratio);
}

Index highest_mode(const StateVector& v) {
  for (Index k = v.size() - 1; k >= 0; --k)
    if (v(k) != cplx(0.0, 0.0)) return k;
  return 0;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace

CoherentState standard_coherent(cplx z, Index dim) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw NumericInputError("coherent state label must be finite");
  CoherentState out;
  out.coeffs = coherent_coefficients<double>(z, dim);
  out.tail_bound = tail_estimate(z, dim);
  if (std::norm(z) > double(dim) / 4.0)
    out.warnings.push_back("|z|^2 = " + fmt(std::norm(z)) + " exceeds dim/4; tail bound " +
                           fmt(out.tail_bound));
  return out;
}

BiCoherentPair bicoherent_pair(const PseudoBosonSystem& sys, cplx z, Route route) {
  BiCoherentPair pair;
  pair.z = z;
  pair.route = route;
  const CoherentState coh = standard_coherent(z, sys.dim());
  pair.warnings = coh.warnings;

  if (route == Route::s_transform) {
    if (!sys.regular())
      throw UsageError("s_transform route needs a regular system; use the series route");
    pair.phi_z = *sys.S * coh.coeffs;
    pair.psi_z = *sys.S_inv * coh.coeffs;
    pair.series_truncation_error = coh.tail_bound * std::max(sys.S->norm(), sys.S_inv->norm());
    return pair;
  }

  if (!sys.regular() && sys.dim() >= 8) {
    const NormGrowthFit fit = norm_growth_fit(sys);
    if (!fit.admissible_phi || !fit.admissible_psi)
      pair.warnings.push_back("norm growth exponent >= 1/2 (phi " + fmt(fit.alpha_phi) +
                              ", psi " + fmt(fit.alpha_psi) + "); series may not converge");
  }
  pair.phi_z = sys.phi * coh.coeffs;
  pair.psi_z = sys.psi * coh.coeffs;
  const double max_norm =
      std::max(sys.phi.colwise().norm().maxCoeff(), sys.psi.colwise().norm().maxCoeff());
  pair.series_truncation_error = coh.tail_bound * max_norm;
  if (pair.series_truncation_error > kTailWarn)
    pair.warnings.push_back("series truncation estimate " + fmt(pair.series_truncation_error));
  return pair;
}

FockMatrix displacement_matrix(Index dim, cplx z) {
  const auto [c, c_dag] = ladder_matrices<double>(dim);
  return matrix_exp<double>(z * c_dag - std::conj(z) * c);
}

FockMatrix displacement_matrix(const PseudoBosonSystem& sys, cplx z, Displacement which) {
  switch (which) {
    case Displacement::W: return displacement_matrix(sys.dim(), z);
    case Displacement::U: return matrix_exp<double>(z * sys.b - std::conj(z) * sys.a);
    case Displacement::V:
      return matrix_exp<double>(z * sys.a.adjoint() - std::conj(z) * sys.b.adjoint());
  }
  throw UsageError("unknown displacement");
}

EigenResiduals eigen_residuals(const PseudoBosonSystem& sys, const BiCoherentPair& pair) {
  const Index n = sys.safe_size();
  const StateVector d1 = sys.a * pair.phi_z - pair.z * pair.phi_z;
  const StateVector d2 = sys.b.adjoint() * pair.psi_z - pair.z * pair.psi_z;
  EigenResiduals r;
  r.r1 = d1.head(n).norm();
  r.r2 = d2.head(n).norm();
  r.r3 = std::abs(pair.phi_z.dot(pair.psi_z) - 1.0);
  return r;
}

ResolutionResult resolution_quadrature(const PseudoBosonSystem& sys, const StateVector& f,
                                       const StateVector& g, const DiscQuadrature& quad) {
  const Index dim = sys.dim();
  if (f.size() != dim || g.size() != dim)
    throw InvalidDimensionError("probe vectors must have the system dimension");

  ResolutionResult out;
  const Index max_mode = std::max(highest_mode(f), highest_mode(g));
  if (quad.radius * quad.radius < 4.0 * double(max_mode))
    out.warnings.push_back("disc radius " + fmt(quad.radius) + " too small for mode " +
                           std::to_string(max_mode));

  // <f, phi_k> and <Psi_k, g>.
  const Eigen::VectorXcd fk = sys.phi.adjoint() * f;
  const Eigen::VectorXcd gk = sys.psi.adjoint() * g;

  const DiscQuadrature::Nodes nodes = quad.nodes();
  std::vector<cplx> terms(std::size_t(nodes.z.size()));
  parallel_for(terms.size(), [&](std::size_t j) {
    const StateVector c = coherent_coefficients<double>(nodes.z(Index(j)), dim);
    const cplx left = (fk.array().conjugate() * c.array()).sum();
    const cplx right = (c.array().conjugate() * gk.array()).sum();
    terms[j] = nodes.w(Index(j)) * left * right;
  });
  out.value = pairwise_sum(std::span<const cplx>(terms)) / std::numbers::pi;
  out.exact = f.dot(g);
  out.error = std::abs(out.value - out.exact);
  return out;
}

FockMatrix t1_factorized(const PseudoBosonSystem& sys, double alpha) {
  const cplx g(0.0, alpha / std::numbers::sqrt2);
  return std::exp(-alpha * alpha / 4.0) * matrix_exp<double>(g * sys.b) *
         matrix_exp<double>(g * sys.a);
}

FockMatrix t2_factorized(const PseudoBosonSystem& sys, double alpha) {
  const double g = alpha / std::numbers::sqrt2;
  return std::exp(-alpha * alpha / 4.0) * matrix_exp<double>(FockMatrix(g * sys.b)) *
         matrix_exp<double>(FockMatrix(-g * sys.a));
}

FockMatrix t1_direct(const PseudoBosonSystem& sys, double alpha) {
  return matrix_exp<double>(cplx(0.0, alpha) * position_operator(sys));
}

FockMatrix t2_direct(const PseudoBosonSystem& sys, double alpha) {
  return matrix_exp<double>(cplx(0.0, -alpha) * momentum_operator(sys));
}

StructureReport weyl_factorization_check(const PseudoBosonSystem& sys, double alpha,
                                         const WeylOptions& options) {
  if (!std::isfinite(alpha)) throw NumericInputError("alpha must be finite");
  const Index rows = sys.safe_size();
  const Index cols = std::min(options.n_modes, rows);
  StructureReport report;

  const FockMatrix t1 = t1_direct(sys, alpha);
  const FockMatrix t2 = t2_direct(sys, alpha);
  report.record("weyl_t1", scaled_deviation(t1_factorized(sys, alpha).topLeftCorner(rows, cols),
                                            t1.topLeftCorner(rows, cols)));
  report.record("weyl_t2", scaled_deviation(t2_factorized(sys, alpha).topLeftCorner(rows, cols),
                                            t2.topLeftCorner(rows, cols)));

  const FockMatrix t1_adj_gen =
      matrix_exp<double>(FockMatrix(cplx(0.0, -alpha) * position_operator(sys).adjoint()));
  ProbeRng rng(options.seed);
  for (int p = 0; p < kPairingProbes; ++p) {
    const StateVector f = rng.vector(sys.dim(), cols);
    const StateVector g = rng.vector(sys.dim(), cols);
    const cplx lhs = (t1_adj_gen * g).dot(f);
    const cplx rhs = g.dot(t1 * f);
    report.record("weyl_adjoint_pairing", scaled_deviation(lhs, rhs));
  }

  const cplx gamma(0.0, alpha / std::numbers::sqrt2);
  const FockMatrix sigma2 = matrix_exp<double>(FockMatrix(gamma * sys.b));
  const Index n_last = std::min(options.n_sigma, sys.safe_last());
  for (Index n = 0; n <= n_last; ++n) {
    const StateVector lhs = sigma2 * sys.phi.col(n);
    StateVector rhs = sys.phi.col(n);
    cplx coef(1.0, 0.0);
    for (Index k = 1; n + k < sys.dim(); ++k) {
      coef *= gamma / double(k) * std::sqrt(double(n + k));
      rhs += coef * sys.phi.col(n + k);
    }
    report.record("sigma2_series", scaled_deviation(lhs.head(rows), rhs.head(rows)));
  }
  return report;
}

StructureReport commutation_check(const PseudoBosonSystem& sys, double alpha,
                                  const WeylOptions& options) {
  const Index support = std::min(options.n_modes, sys.safe_size());
  const FockMatrix t1 = t1_factorized(sys, alpha);
  const FockMatrix t2 = t2_factorized(sys, alpha);
  StructureReport report;
  ProbeRng rng(options.seed);
  for (int p = 0; p < kPairingProbes; ++p) {
    const StateVector f = rng.vector(sys.dim(), support);
    const StateVector g = rng.vector(sys.dim(), support);
    const cplx lhs = (t2.adjoint() * g).dot(t1 * f);
    const cplx rhs = (t1.adjoint() * g).dot(t2 * f);
    report.record("t1_t2_commutation", scaled_deviation(lhs, rhs));
  }
  return report;
}

}  // namespace pbx
