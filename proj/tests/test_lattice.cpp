#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "pbx/bicoherent.hpp"
#include "pbx/lattice.hpp"

using namespace pbx;

TEST_CASE("lattice points") {
  const std::vector<cplx> single = lattice_points(LatticeSpec::make(1, 0, 32, 4));
  REQUIRE(single.size() == 1);
  CHECK(single[0] == cplx(0.0, 0.0));

  const std::vector<cplx> l1 = lattice_points(LatticeSpec::make(1, 1, 32, 4));
  REQUIRE(l1.size() == 9);
  // n1 outer, n2 inner: index (n1 + 1) * 3 + (n2 + 1)
  CHECK(std::abs(l1[7] - cplx(std::sqrt(std::numbers::pi), 0.0)) < 1e-15);
  CHECK(std::abs(l1[7]) == doctest::Approx(1.7725).epsilon(1e-4));
  CHECK(std::abs(l1[5] - cplx(0.0, std::sqrt(std::numbers::pi))) < 1e-15);

  const std::vector<cplx> l2 = lattice_points(LatticeSpec::make(2, 1, 32, 4));
  CHECK(std::abs(l2[8]) == doctest::Approx(std::sqrt(4.0 * std::numbers::pi)).epsilon(1e-14));
  CHECK(std::abs(l2[8]) == doctest::Approx(3.5449).epsilon(1e-4));
  CHECK(std::arg(l2[8]) == doctest::Approx(std::numbers::pi / 4.0));

  LatticeSpec bad = LatticeSpec::make(1, 1, 32, 4);
  bad.alpha = 2.0;
  CHECK_THROWS_AS(bad.validate(), NumericInputError);
  CHECK_THROWS_AS(LatticeSpec::make(1, 1, 32, 9), RangeError);
  CHECK_THROWS_AS(LatticeSpec::make(1, 1, 32, 0), RangeError);
  CHECK_THROWS_AS(LatticeSpec::make(0, 1, 32, 4), InvalidDimensionError);
}

TEST_CASE("displacement factorization on the lattice") {
  const PseudoBosonSystem id = build_system(SystemSpec::identity(128));
  const LatticeSpec spec = LatticeSpec::make(1, 3, 128, 12);
  CHECK(displacement_factorization_check(id, spec, 0, 24) < 1e-15);
  CHECK(displacement_factorization_check(id, spec, 1, 24) < 1e-6);

  SUBCASE("U(z_(1,0)) is T2 up to the sign rule") {
    const cplx z = lattice_points(LatticeSpec::make(1, 1, 128, 4))[7];
    const FockMatrix U = displacement_matrix(id, z, Displacement::U);
    const FockMatrix T2 = t2_direct(id, spec.alpha);
    CHECK((U - T2).topLeftCorner(100, 24).cwiseAbs().maxCoeff() < 1e-6);
  }

  SUBCASE("regular Riesz system at L = 2") {
    Eigen::VectorXd s(128);
    for (Index n = 0; n < 128; ++n) s(n) = 1.0 + 1.0 / double(n + 1);
    const PseudoBosonSystem harm = build_system(SystemSpec::diagonal_riesz(s));
    CHECK(displacement_factorization_check(harm, LatticeSpec::make(2, 3, 128, 12), 1, 8) < 1e-6);
  }
}

TEST_CASE("least-squares synthesis") {
  SUBCASE("single state closed form") {
    const PseudoBosonSystem sh = build_system(SystemSpec::shifted_oscillator(64, cplx(0.4, 0.2), 0.1));
    const LatticeSpec spec = LatticeSpec::make(1, 0, 64, 8);
    const LatticeReport r = synthesis_svd(sh, spec);
    REQUIRE(r.residuals.size() == 8);
    const StateVector v = sh.phi.col(0).head(sh.safe_size());
    for (Index m = 0; m < 8; ++m) {
      const double expect = std::sqrt(std::max(0.0, 1.0 - std::norm(v(m)) / v.squaredNorm()));
      CHECK(r.residuals[std::size_t(m)] == doctest::Approx(expect).epsilon(1e-12));
    }
    CHECK(r.rank == 1);
  }

  SUBCASE("L = 1 beats L = 2 on every non-trivial mode") {
    const PseudoBosonSystem id = build_system(SystemSpec::identity(128));
    const LatticeReport r1 = synthesis_svd(id, LatticeSpec::make(1, 3, 128, 12));
    const LatticeReport r2 = synthesis_svd(id, LatticeSpec::make(2, 3, 128, 12));
    CHECK(r1.residuals[0] < 1e-12);
    for (std::size_t m = 1; m <= 8; ++m) CHECK(r1.residuals[m] < r2.residuals[m]);
    CHECK(r2.max_residual() > 0.1);
    CHECK(r1.n_columns == 49);
    CHECK(r1.n_rows == id.safe_size());
  }

  SUBCASE("window growth lowers the residual at L = 1") {
    const PseudoBosonSystem id = build_system(SystemSpec::identity(128));
    const auto curve = window_curve(id, LatticeSpec::make(1, 2, 128, 12), {2, 3, 4});
    REQUIRE(curve.size() == 3);
    CHECK(curve[1].second <= curve[0].second);
    CHECK(curve[2].second <= curve[1].second);
  }

  SUBCASE("removing the corner point keeps the residual bounded") {
    const PseudoBosonSystem id = build_system(SystemSpec::identity(128));
    const LatticeSpec spec = LatticeSpec::make(1, 3, 128, 12);
    const LatticeReport full = synthesis_svd(id, spec);
    SynthesisOptions opts;
    opts.drop_point = std::pair{3, 3};
    const LatticeReport dropped = synthesis_svd(id, spec, opts);
    CHECK(dropped.n_columns == 48);
    for (std::size_t m = 0; m < full.residuals.size(); ++m)
      CHECK(dropped.residuals[m] <= 2.0 * full.residuals[m] + 1e-12);
    opts.drop_point = std::pair{4, 0};
    CHECK_THROWS_AS(synthesis_svd(id, spec, opts), RangeError);
  }

  SUBCASE("too many states for the safe block") {
    const PseudoBosonSystem id = build_system(SystemSpec::identity(64));
    CHECK_THROWS_AS(synthesis_svd(id, LatticeSpec::make(1, 4, 64, 8)), CoverageError);
  }
}

TEST_CASE("exponential rank against brute-force SVD") {
  const std::pair<int, Index> cases[] = {{1, 8}, {2, 8}, {3, 9}, {1, 12}, {2, 12}, {4, 12}};
  for (auto [L, K] : cases) {
    const ExponentialRank r = exponential_rank(L, K);
    CHECK(r.expected == K * K / (L * L));
    CHECK(r.rank == oracle::exponential_rank_bruteforce(L, K));
    CHECK(r.rank == r.expected);
  }
  CHECK(exponential_rank(1, 8).rank == 64);
  CHECK(exponential_rank(2, 8).rank == 16);
  CHECK(exponential_rank(3, 9).rank == 9);
  CHECK_THROWS_AS(exponential_rank(2, 9), SamplingAliasError);
}
