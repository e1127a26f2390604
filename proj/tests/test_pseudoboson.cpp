#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "pbx/numeric.hpp"
#include "pbx/pseudoboson.hpp"

using namespace pbx;

namespace {

Eigen::VectorXd harmonic_profile(Index dim) {
  Eigen::VectorXd s(dim);
  for (Index n = 0; n < dim; ++n) s(n) = 1.0 + 1.0 / double(n + 1);
  return s;
}

double max_deviation(const StructureReport& report) {
  double worst = 0.0;
  for (const auto& [name, dev] : report.deviations)
    if (name != "theta_positivity") worst = std::max(worst, dev);
  return worst;
}

}  // namespace

TEST_CASE("identity system is the bosonic case") {
  const PseudoBosonSystem sys = build_system(SystemSpec::identity(8));
  const auto [c, c_dag] = ladder_matrices(8);
  CHECK((sys.a - c).cwiseAbs().maxCoeff() == 0.0);
  CHECK((sys.b - c_dag).cwiseAbs().maxCoeff() == 0.0);
  CHECK((sys.phi - FockMatrix::Identity(8, 8)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((*sys.theta - FockMatrix::Identity(8, 8)).cwiseAbs().maxCoeff() == 0.0);

  const StructureReport report = verify_structure(build_system(SystemSpec::identity(16)));
  CHECK(max_deviation(report) < 1e-12);
  CHECK(report.at("theta_positivity") == 0.0);
}

TEST_CASE("diagonal Riesz system") {
  Eigen::VectorXd s(2);
  s << 2.0, 1.0;
  const PseudoBosonSystem sys = build_system(SystemSpec::diagonal_riesz(s));
  CHECK(std::abs(sys.phi(0, 0) - 2.0) < 1e-15);
  CHECK(std::abs(sys.phi(1, 0)) == 0.0);
  CHECK(std::abs(sys.psi(0, 0) - 0.5) < 1e-15);
  CHECK(std::abs(sys.phi.col(0).dot(sys.psi.col(0)) - 1.0) < 1e-15);

  const PseudoBosonSystem harm = build_system(SystemSpec::diagonal_riesz(harmonic_profile(32)));
  // Gram matrix recomputed entry by entry
  double worst = 0.0;
  for (Index m = 0; m <= harm.safe_last(); ++m)
    for (Index n = 0; n <= harm.safe_last(); ++n) {
      cplx g = 0.0;
      for (Index k = 0; k < 32; ++k) g += std::conj(harm.phi(k, m)) * harm.psi(k, n);
      worst = std::max(worst, std::abs(g - (m == n ? 1.0 : 0.0)));
    }
  CHECK(worst < 1e-10);
  CHECK(verify_structure(harm).at("biorthogonality") < 1e-10);
  CHECK(max_deviation(verify_structure(harm)) < 1e-8);
  CHECK(harm.condition_number == doctest::Approx(2.0 / (1.0 + 1.0 / 32.0)));
}

TEST_CASE("Riesz bounds are enforced") {
  Eigen::VectorXd s = Eigen::VectorXd::Ones(6);
  s(3) = 0.0;
  CHECK_THROWS_AS(build_system(SystemSpec::diagonal_riesz(s)), ConstructionError);
  s(3) = -1.0;
  CHECK_THROWS_AS(build_system(SystemSpec::diagonal_riesz(s)), ConstructionError);
  CHECK_THROWS_AS(build_system(SystemSpec::identity(1)), InvalidDimensionError);

  FockMatrix singular = FockMatrix::Identity(4, 4);
  singular(2, 2) = 0.0;
  CHECK_THROWS_AS(build_system(SystemSpec::custom_matrix(singular)), ConstructionError);
}

TEST_CASE("custom matrix system keeps the positive polar factor") {
  ProbeRng rng(3);
  FockMatrix m(24, 24);
  for (Index i = 0; i < 24; ++i)
    for (Index j = 0; j < 24; ++j) m(i, j) = cplx(rng.uniform() - 0.5, rng.uniform() - 0.5) * 0.1;
  const FockMatrix s = FockMatrix::Identity(24, 24) + 0.5 * (m + m.adjoint());
  const PseudoBosonSystem sys = build_system(SystemSpec::custom_matrix(s));
  CHECK(scaled_deviation(*sys.S, s) < 1e-12);
  CHECK(max_deviation(verify_structure(sys)) < 1e-8);
}

TEST_CASE("shifted oscillator") {
  const cplx al(0.3, 0.0), be(0.1, 0.0);
  const PseudoBosonSystem sys = build_system(SystemSpec::shifted_oscillator(64, al, be));
  CHECK_FALSE(sys.regular());
  CHECK(std::abs(sys.phi.col(0).dot(sys.psi.col(0)) - 1.0) < 1e-10);

  const double delta = (0.3 + 0.1) / std::numbers::sqrt2;
  const FockMatrix expected = quadrature_matrices(64).x0 + delta * FockMatrix::Identity(64, 64);
  CHECK((position_operator(sys) - expected).cwiseAbs().maxCoeff() < 1e-14);

  SUBCASE("ladder relations agree with an extended-dimension oracle") {
    const cplx a2(0.5, 0.0), b2(-0.2, 0.0);
    const PseudoBosonSystem s64 = build_system(SystemSpec::shifted_oscillator(64, a2, b2));
    const Eigen::MatrixXcd ref = oracle::shifted_phi(a2, b2, 128);
    const Index last = s64.safe_last();
    double worst = 0.0;
    for (Index n = 0; n <= last; ++n) {
      const Eigen::VectorXcd ref_n = ref.col(n).head(64);
      worst = std::max(worst, (s64.phi.col(n) - ref_n).norm() / ref_n.norm());
    }
    CHECK(worst < 1e-8);
    const StructureReport report = verify_structure(s64);
    for (const char* name : {"ladder_b_phi", "ladder_a_phi", "ladder_adag_psi", "ladder_bdag_psi"})
      CHECK(report.at(name) < 1e-8);
  }

  SUBCASE("structure suite on the safe block") {
    const StructureReport report =
        verify_structure(build_system(SystemSpec::shifted_oscillator(96, al, be)));
    CHECK(max_deviation(report) < 1e-8);
    CHECK_FALSE(report.contains("theta_conjugation"));
  }

  SUBCASE("regular-only operations refuse") {
    CHECK_THROWS_AS(require_regular(sys, "test"), UnsupportedSystemError);
  }
}

TEST_CASE("quasi-basis residual") {
  const PseudoBosonSystem id = build_system(SystemSpec::identity(16));
  StateVector e0 = StateVector::Zero(16), e2 = StateVector::Zero(16);
  e0(0) = 1.0;
  e2(2) = 1.0;
  CHECK(quasi_basis_residual(id, e0, e0, 1)[0] == doctest::Approx(0.0));

  const std::vector<double> r = quasi_basis_residual(id, e2, e2, 8);
  REQUIRE(r.size() == 8);
  CHECK(r[0] == doctest::Approx(1.0));
  CHECK(r[1] == doctest::Approx(1.0));
  for (std::size_t k = 2; k < 8; ++k) CHECK(r[k] == doctest::Approx(0.0));

  const PseudoBosonSystem flat = build_system(SystemSpec::diagonal_riesz(Eigen::VectorXd::Constant(20, 1.5)));
  StateVector f = StateVector::Zero(20);
  f(0) = f(1) = 1.0 / std::numbers::sqrt2;
  CHECK(quasi_basis_residual(flat, f, f, 20).back() < 1e-12);

  CHECK_THROWS_AS(quasi_basis_residual(id, e0, e0, 17), RangeError);
}

TEST_CASE("norm growth fit") {
  const NormGrowthFit id = norm_growth_fit(build_system(SystemSpec::identity(32)));
  CHECK(std::abs(id.alpha_phi) < 1e-10);
  CHECK(id.r_phi == doctest::Approx(1.0));
  CHECK(id.admissible_phi);

  const NormGrowthFit harm = norm_growth_fit(build_system(SystemSpec::diagonal_riesz(harmonic_profile(48))));
  CHECK(std::abs(harm.alpha_phi) < 0.05);
  CHECK(std::abs(harm.alpha_psi) < 0.05);

  // direct fit of log||phi_n|| for the shifted oscillator
  const PseudoBosonSystem sh = build_system(SystemSpec::shifted_oscillator(96, 1.0, 0.0));
  const NormGrowthFit fit = norm_growth_fit(sh);
  CHECK(std::isfinite(fit.alpha_phi));
  CHECK(std::isfinite(fit.r_phi));
  const Index last = sh.safe_last();
  const Eigen::MatrixXcd ref = oracle::shifted_phi(1.0, 0.0, 192);
  Eigen::MatrixXd design(last + 1, 2);
  Eigen::VectorXd rhs(last + 1);
  for (Index n = 0; n <= last; ++n) {
    design(n, 0) = double(n);
    design(n, 1) = std::lgamma(double(n) + 1.0);
    rhs(n) = std::log(ref.col(n).norm());
  }
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(rhs);
  CHECK(fit.alpha_phi == doctest::Approx(coef(1)).epsilon(1e-6));
  CHECK(fit.admissible_phi == (fit.alpha_phi < 0.5));

  CHECK_THROWS_AS(norm_growth_fit(build_system(SystemSpec::identity(4))), InvalidDimensionError);
}
