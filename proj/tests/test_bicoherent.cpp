#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "pbx/bicoherent.hpp"
#include "pbx/numeric.hpp"

using namespace pbx;

namespace {

const double kSqrt2Pi = std::sqrt(2.0 * std::numbers::pi);

SystemSpec harmonic(Index dim) {
  Eigen::VectorXd s(dim);
  for (Index n = 0; n < dim; ++n) s(n) = 1.0 + 1.0 / double(n + 1);
  return SystemSpec::diagonal_riesz(s);
}

StateVector basis(Index dim, Index k) {
  StateVector e = StateVector::Zero(dim);
  e(k) = 1.0;
  return e;
}

}  // namespace

TEST_CASE("standard coherent states") {
  const CoherentState zero = standard_coherent(0.0, 16);
  CHECK((zero.coeffs - basis(16, 0)).cwiseAbs().maxCoeff() == 0.0);

  const CoherentState one = standard_coherent(1.0, 32);
  CHECK(one.coeffs(2).real() == doctest::Approx(std::exp(-0.5) / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(one.coeffs(2).real() == doctest::Approx(0.42888).epsilon(1e-5));
  double tail = 0.0;
  for (int k = 32; k < 120; ++k) tail += std::abs(oracle::coherent_coefficient(1.0, k));
  CHECK(one.tail_bound >= tail * (1.0 - 1e-10));
  CHECK(one.tail_bound <= 2.0 * tail);
  CHECK(one.warnings.empty());

  const cplx ov = standard_coherent(1.0, 48).coeffs.dot(standard_coherent(cplx(0.0, 1.0), 48).coeffs);
  CHECK(std::abs(std::abs(ov) - std::exp(-1.0)) < 1e-10);

  SUBCASE("overlap law against the series oracle") {
    const cplx labels[] = {{0.0, 0.0}, {1.3, -0.4}, {-2.0, 0.0}, {0.9, 1.7}, {-1.1, -1.2}};
    for (cplx z : labels)
      for (cplx w : labels) {
        const cplx got = standard_coherent(z, 64).coeffs.dot(standard_coherent(w, 64).coeffs);
        CHECK(std::abs(got - oracle::overlap_series(z, w)) < 1e-9);
      }
  }

  SUBCASE("labels outside the reliable region warn") {
    const CoherentState far = standard_coherent(cplx(4.0, 3.0), 32);
    CHECK_FALSE(far.warnings.empty());
    CHECK(far.tail_bound > 1e-6);
  }
}

TEST_CASE("bi-coherent pairs") {
  const PseudoBosonSystem id = build_system(SystemSpec::identity(48));
  const cplx z(0.7, 0.2);
  const BiCoherentPair p = bicoherent_pair(id, z);
  const StateVector coh = standard_coherent(z, 48).coeffs;
  CHECK((p.phi_z - coh).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((p.psi_z - coh).cwiseAbs().maxCoeff() < 1e-15);

  SUBCASE("series and S routes agree for regular systems") {
    for (const SystemSpec& spec : {harmonic(64), SystemSpec::identity(64)}) {
      const PseudoBosonSystem sys = build_system(spec);
      for (cplx w : {cplx(0.7, 0.2), cplx(-2.1, 1.4), cplx(0.0, 3.0), cplx(2.0, -2.2)}) {
        const BiCoherentPair a = bicoherent_pair(sys, w, Route::series);
        const BiCoherentPair b = bicoherent_pair(sys, w, Route::s_transform);
        CHECK((a.phi_z - b.phi_z).norm() < 1e-8);
        CHECK((a.psi_z - b.psi_z).norm() < 1e-8);
      }
    }
  }

  SUBCASE("identity reduction <phi(z), Psi(z)> = 1") {
    for (cplx w : {cplx(0.0, 0.0), cplx(1.5, -2.5), cplx(-3.0, 0.0)})
      CHECK(std::abs(bicoherent_pair(id, w).phi_z.dot(bicoherent_pair(id, w).psi_z) - 1.0) < 1e-10);
  }

  SUBCASE("S route needs S") {
    const PseudoBosonSystem sh = build_system(SystemSpec::shifted_oscillator(32, 0.3, 0.1));
    CHECK_THROWS_AS(bicoherent_pair(sh, z, Route::s_transform), UsageError);
  }

  SUBCASE("large labels carry a truncation warning") {
    const BiCoherentPair far = bicoherent_pair(build_system(SystemSpec::identity(16)), cplx(3.5, 0.0));
    CHECK(far.series_truncation_error > 1e-6);
    CHECK_FALSE(far.warnings.empty());
  }
}

TEST_CASE("displacement operators") {
  CHECK(scaled_deviation(displacement_matrix(12, 0.0), FockMatrix::Identity(12, 12)) == 0.0);

  const PseudoBosonSystem id = build_system(SystemSpec::identity(32));
  const cplx z(0.6, -0.8);
  const FockMatrix W = displacement_matrix(id, z, Displacement::W);
  CHECK((displacement_matrix(id, z, Displacement::U) - W).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((displacement_matrix(id, z, Displacement::V) - W).cwiseAbs().maxCoeff() < 1e-12);

  const PseudoBosonSystem harm = build_system(harmonic(64));
  const Index rows = harm.safe_size();
  const FockMatrix U = displacement_matrix(harm, 0.5, Displacement::U);
  const FockMatrix V = displacement_matrix(harm, 0.5, Displacement::V);
  const BiCoherentPair p = bicoherent_pair(harm, 0.5);
  CHECK((StateVector(U * harm.phi.col(0)) - p.phi_z).head(rows).norm() < 1e-7);
  CHECK((StateVector(V * harm.psi.col(0)) - p.psi_z).head(rows).norm() < 1e-7);
}

TEST_CASE("eigen residuals") {
  const PseudoBosonSystem id = build_system(SystemSpec::identity(64));
  const EigenResiduals at0 = eigen_residuals(id, bicoherent_pair(id, 0.0));
  CHECK(at0.r1 == 0.0);

  const EigenResiduals r = eigen_residuals(id, bicoherent_pair(id, cplx(1.0, 1.0)));
  CHECK(r.r1 < 1e-9);
  CHECK(r.r2 < 1e-9);
  CHECK(r.r3 < 1e-9);

  const PseudoBosonSystem sh96 = build_system(SystemSpec::shifted_oscillator(96, 0.3, 0.1));
  const PseudoBosonSystem sh192 = build_system(SystemSpec::shifted_oscillator(192, 0.3, 0.1));
  const BiCoherentPair p96 = bicoherent_pair(sh96, 0.5);
  const BiCoherentPair p192 = bicoherent_pair(sh192, 0.5);
  CHECK(eigen_residuals(sh96, p96).r3 < 1e-8);
  CHECK(std::abs(p96.phi_z.dot(p96.psi_z) - p192.phi_z.dot(p192.psi_z)) < 1e-8);
  CHECK((p96.phi_z.head(sh96.safe_size()) - p192.phi_z.head(sh96.safe_size())).norm() < 1e-8);
}

TEST_CASE("resolution of the identity") {
  const PseudoBosonSystem id = build_system(SystemSpec::identity(64));
  const ResolutionResult r00 =
      resolution_quadrature(id, basis(64, 0), basis(64, 0), DiscQuadrature(6.0, 64, 64));
  CHECK(std::abs(r00.value - 1.0) < 1e-8);
  CHECK(r00.error < 1e-8);

  for (const SystemSpec& spec : {SystemSpec::identity(64), harmonic(64)}) {
    const PseudoBosonSystem sys = build_system(spec);
    CHECK(std::abs(resolution_quadrature(sys, basis(64, 0), basis(64, 1), DiscQuadrature(6.0, 48, 48)).value) < 1e-8);
  }

  const PseudoBosonSystem harm = build_system(harmonic(128));
  const ResolutionResult r33 =
      resolution_quadrature(harm, basis(128, 3), basis(128, 3), DiscQuadrature(7.0, 64, 64));
  CHECK(std::abs(r33.value - 1.0) < 1e-6);

  SUBCASE("truncated disc against the incomplete gamma function") {
    // |<e_k, Phi(z)>|^2 = e^{-r^2} r^{2k}/k!, so the disc of radius R yields P(k+1, R^2).
    for (int k : {0, 2, 5}) {
      const ResolutionResult r =
          resolution_quadrature(id, basis(64, k), basis(64, k), DiscQuadrature(2.5, 48, 48));
      CHECK(std::abs(r.value.real() - oracle::regularized_gamma(k, 6.25)) < 1e-12);
      CHECK(std::abs(r.value.imag()) < 1e-14);
    }
  }

  SUBCASE("error does not grow under refinement") {
    double prev = std::numeric_limits<double>::infinity();
    for (Index n : {8, 16, 32, 64}) {
      const double err =
          resolution_quadrature(harm, basis(128, 2), basis(128, 2), DiscQuadrature(7.0, n, n)).error;
      CHECK(err <= 1.1 * prev + 1e-12);
      prev = err;
    }
  }

  SUBCASE("small radius triggers a coverage warning") {
    const ResolutionResult r =
        resolution_quadrature(id, basis(64, 6), basis(64, 6), DiscQuadrature(3.0, 16, 16));
    CHECK_FALSE(r.warnings.empty());
  }
}

TEST_CASE("Weyl factorizations") {
  const PseudoBosonSystem id = build_system(SystemSpec::identity(96));

  const StructureReport zero = weyl_factorization_check(id, 0.0);
  for (const auto& [name, dev] : zero.deviations) CHECK_MESSAGE(dev < 1e-15, name);

  const StructureReport full = weyl_factorization_check(id, kSqrt2Pi);
  CHECK(full.at("weyl_t1") < 1e-8);
  CHECK(full.at("weyl_t2") < 1e-8);

  SUBCASE("factorized T1 is unitary on the bosonic safe block") {
    const FockMatrix t1 = t1_factorized(id, kSqrt2Pi);
    const FockMatrix prod = t1_factorized(id, -kSqrt2Pi) * t1;
    CHECK(scaled_deviation(prod.topLeftCorner(16, 16), FockMatrix::Identity(16, 16)) < 1e-8);
  }

  SUBCASE("sigma_2 series on the shifted oscillator") {
    const PseudoBosonSystem sh = build_system(SystemSpec::shifted_oscillator(96, 0.3, 0.1));
    WeylOptions opts;
    opts.n_sigma = 0;
    CHECK(weyl_factorization_check(sh, 1.0, opts).at("sigma2_series") < 1e-9);
    opts.n_sigma = 4;
    CHECK(weyl_factorization_check(sh, 1.0, opts).at("sigma2_series") < 1e-8);
  }

  SUBCASE("T1 and T2 commute in the pairing sense at alpha^2 = 2 pi L") {
    for (const SystemSpec& spec : {SystemSpec::identity(96), harmonic(96)}) {
      const PseudoBosonSystem sys = build_system(spec);
      CHECK(commutation_check(sys, kSqrt2Pi).at("t1_t2_commutation") < 1e-8);
      CHECK(commutation_check(sys, std::sqrt(4.0 * std::numbers::pi)).at("t1_t2_commutation") < 1e-8);
    }
    // off the lattice condition the pairing fails
    CHECK(commutation_check(id, 1.3).at("t1_t2_commutation") > 1e-3);
  }
}
