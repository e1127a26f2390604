#include "pbx/lattice.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>

#include "pbx/bicoherent.hpp"
#include "pbx/numeric.hpp"
#include "pbx/parallel.hpp"

namespace pbx {

namespace {

constexpr double kTailWarn = 1e-6;
constexpr double kExpRankTau = 1e-8;

// Singular values of the K x K factor e^{sign 2 pi i L n t / K}, n in [-K/2, K/2).
Eigen::VectorXd factor_singular_values(int L, Index K, double sign) {
  Eigen::MatrixXcd m(K, K);
  for (Index r = 0; r < K; ++r) {
    const Index n = r - K / 2;
    for (Index t = 0; t < K; ++t)
      m(r, t) = std::polar(1.0, sign * 2.0 * std::numbers::pi * double(L * n * t % K) / double(K));
  }
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues();
}

}  // namespace

LatticeSpec LatticeSpec::make(int L, int W, Index dim, Index target_modes) {
  LatticeSpec s;
  s.L = L;
  s.alpha = std::sqrt(2.0 * std::numbers::pi * double(L));
  s.W = W;
  s.dim = dim;
  s.target_modes = target_modes;
  s.validate();
  return s;
}

void LatticeSpec::validate() const {
  require_dim(dim);
  if (L < 1) throw InvalidDimensionError("L must be a positive integer");
  if (W < 0) throw InvalidDimensionError("window W must be >= 0");
  const double target = 2.0 * std::numbers::pi * double(L);
  if (!std::isfinite(alpha) || std::abs(alpha * alpha - target) > 1e-12 * target)
    throw NumericInputError("alpha² ≠ 2πL (alpha = " + std::to_string(alpha) + ")");
  if (target_modes < 1 || target_modes > dim / 4)
    throw RangeError("target_modes = " + std::to_string(target_modes) +
                     " must lie in [1, dim/4 = " + std::to_string(dim / 4) + "]");
}

std::vector<cplx> lattice_points(const LatticeSpec& spec) {
  std::vector<cplx> z;
  z.reserve(std::size_t(spec.n_points()));
  const double step = spec.alpha / std::numbers::sqrt2;
  for (int n1 = -spec.W; n1 <= spec.W; ++n1)
    for (int n2 = -spec.W; n2 <= spec.W; ++n2) z.emplace_back(step * n1, step * n2);
  return z;
}

double displacement_factorization_check(const PseudoBosonSystem& sys, const LatticeSpec& spec,
                                        int n_max, Index n_modes) {
  const Index rows = sys.safe_size();
  const Index cols = std::min(n_modes, rows);
  const Index dim = sys.dim();
  // T^k for k in [-n_max, n_max], negative powers from the factorization at -alpha.
  std::map<int, FockMatrix> p1, p2;
  p1[0] = p2[0] = FockMatrix::Identity(dim, dim);
  const FockMatrix t1 = t1_factorized(sys, spec.alpha), t1i = t1_factorized(sys, -spec.alpha);
  const FockMatrix t2 = t2_factorized(sys, spec.alpha), t2i = t2_factorized(sys, -spec.alpha);
  for (int k = 1; k <= n_max; ++k) {
    p1[k] = t1 * p1[k - 1];
    p1[-k] = t1i * p1[-k + 1];
    p2[k] = t2 * p2[k - 1];
    p2[-k] = t2i * p2[-k + 1];
  }
  const double step = spec.alpha / std::numbers::sqrt2;
  double worst = 0.0;
  for (int n1 = -n_max; n1 <= n_max; ++n1) {
    for (int n2 = -n_max; n2 <= n_max; ++n2) {
      const cplx z(step * n1, step * n2);
      const FockMatrix direct = displacement_matrix(sys, z, Displacement::U);
      const double sign = (spec.L * n1 * n2) % 2 == 0 ? 1.0 : -1.0;
      const FockMatrix fact = sign * (p1[n2] * p2[n1]);
      worst = std::max(worst, scaled_deviation(fact.topLeftCorner(rows, cols),
                                               direct.topLeftCorner(rows, cols)));
    }
  }
  return worst;
}

double LatticeReport::max_residual() const {
  return residuals.empty() ? 0.0 : *std::max_element(residuals.begin(), residuals.end());
}

LatticeReport synthesis_svd(const PseudoBosonSystem& sys, const LatticeSpec& spec,
                            const SynthesisOptions& options) {
  spec.validate();
  if (spec.dim != sys.dim())
    throw InvalidDimensionError("lattice dim " + std::to_string(spec.dim) +
                                " differs from system dim " + std::to_string(sys.dim()));
  std::vector<cplx> points = lattice_points(spec);
  if (options.drop_point) {
    const auto [d1, d2] = *options.drop_point;
    if (std::abs(d1) > spec.W || std::abs(d2) > spec.W)
      throw RangeError("dropped point lies outside the window");
    points.erase(points.begin() + (d1 + spec.W) * (2 * spec.W + 1) + (d2 + spec.W));
  }

  LatticeReport report;
  const Index rows = sys.safe_size();
  const Index cols = Index(points.size());
  report.n_rows = rows;
  report.n_columns = cols;
  if (cols >= rows)
    throw CoverageError(std::to_string(cols) + " lattice states against " + std::to_string(rows) +
                        " safe coordinates; increase dim or shrink W");

  Eigen::MatrixXcd A(rows, cols);
  std::vector<double> tails(points.size());
  parallel_for(points.size(), [&](std::size_t c) {
    const BiCoherentPair pair = bicoherent_pair(sys, points[c], Route::series);
    const StateVector& v = options.family == LatticeFamily::phi ? pair.phi_z : pair.psi_z;
    const Eigen::VectorXcd col = v.head(rows);
    A.col(Index(c)) = col / col.norm();
    tails[c] = pair.series_truncation_error;
  });
  const auto over = std::count_if(tails.begin(), tails.end(), [](double t) { return t > kTailWarn; });
  if (over > 0) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%ld of %ld columns have tail estimate above 1e-6 (max %.3e)",
                  long(over), long(cols), *std::max_element(tails.begin(), tails.end()));
    report.warnings.emplace_back(buf);
  }

  const Eigen::BDCSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU);
  const Eigen::VectorXd& sv = svd.singularValues();
  report.singular_values.assign(sv.data(), sv.data() + sv.size());
  const double cut = options.tau * (sv.size() > 0 ? sv(0) : 0.0);
  Index rank = 0;
  while (rank < sv.size() && sv(rank) > cut) ++rank;
  report.rank = rank;
  report.rank_fraction = double(rank) / double(std::min(rows, cols));

  const Eigen::MatrixXcd U = svd.matrixU().leftCols(rank);
  for (Index m = 0; m < spec.target_modes; ++m) {
    Eigen::VectorXcd r = -U * U.row(m).adjoint();
    r(m) += 1.0;
    report.residuals.push_back(r.norm());
  }
  return report;
}

std::vector<std::pair<int, double>> window_curve(const PseudoBosonSystem& sys, LatticeSpec spec,
                                                 const std::vector<int>& windows,
                                                 const SynthesisOptions& options) {
  std::vector<std::pair<int, double>> curve;
  for (int w : windows) {
    spec.W = w;
    curve.emplace_back(w, synthesis_svd(sys, spec, options).max_residual());
  }
  return curve;
}

ExponentialRank exponential_rank(int L, Index K) {
  if (L < 1 || K < 1) throw InvalidDimensionError("L and K must be positive");
  if (K % L != 0)
    throw SamplingAliasError("K = " + std::to_string(K) + " is not divisible by L = " +
                             std::to_string(L));
  // The sample matrix is the Kronecker product of the q-factor e^{i alpha q n2}
  // and the k-factor e^{-i alpha k n1}; alpha^2 = 2 pi L turns both into
  // e^{+-2 pi i L n t / K}.
  const Eigen::VectorXd sq = factor_singular_values(L, K, 1.0);
  const Eigen::VectorXd sk = factor_singular_values(L, K, -1.0);
  const double top = sq.maxCoeff() * sk.maxCoeff();
  Index rank = 0;
  for (Index a = 0; a < K; ++a)
    for (Index b = 0; b < K; ++b)
      if (sq(a) * sk(b) > kExpRankTau * top) ++rank;
  return {rank, K * K / (Index(L) * Index(L))};
}

}  // namespace pbx
