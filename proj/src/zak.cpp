#include "pbx/zak.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "pbx/bicoherent.hpp"
#include "pbx/numeric.hpp"
#include "pbx/parallel.hpp"

namespace pbx {

namespace {

Index floor_mod(Index a, Index m) { return ((a % m) + m) % m; }

// Global sample index of grid point 0, i.e. x_min / h, after checking that
// the grid is commensurate with alpha/Q.
Index aligned_offset(const PositionGrid& grid, const ZakParams& p) {
  const double h = p.spacing();
  if (std::abs(grid.spacing() / h - 1.0) > 1e-9)
    throw AlignmentError("grid spacing " + std::to_string(grid.spacing()) +
                         " is not alpha/Q = " + std::to_string(h));
  const double pos = grid.x_min / h;
  const double m0 = std::round(pos);
  if (std::abs(pos - m0) > 1e-6)
    throw AlignmentError("grid points are not integer multiples of alpha/Q");
  return Index(m0);
}

StateVector basis_vector(Index dim, Index n) {
  StateVector e = StateVector::Zero(dim);
  e(n) = 1.0;
  return e;
}

double rel_gap(double actual, double expected) {
  return std::abs(actual - expected) / std::max(1.0, std::abs(expected));
}

}  // namespace

ZakParams ZakParams::make(int L, Index Q, Index Kk, Index n_window) {
  ZakParams p;
  p.L = L;
  p.alpha = std::sqrt(2.0 * std::numbers::pi * double(L));
  p.Q = Q;
  p.Kk = Kk;
  p.n_window = n_window;
  p.validate();
  return p;
}

Index ZakParams::default_window(int L, Index dim) {
  const double lx = std::sqrt(2.0 * double(dim)) + 4.0;
  return Index(std::ceil(lx / std::sqrt(2.0 * std::numbers::pi * double(L)))) + 1;
}

void ZakParams::validate() const {
  if (L < 1) throw InvalidDimensionError("L must be a positive integer");
  const double target = 2.0 * std::numbers::pi * double(L);
  if (!std::isfinite(alpha) || std::abs(alpha * alpha - target) > 1e-12 * target)
    throw NumericInputError("alpha² ≠ 2πL (alpha = " + std::to_string(alpha) +
                            ", L = " + std::to_string(L) + ")");
  if (Q < 8 || Kk < 8) throw InvalidDimensionError("Q and Kk must be >= 8");
  if (n_window < 1) throw InvalidDimensionError("n_window must be >= 1");
  if (Kk % L != 0)
    throw SamplingAliasError("Kk = " + std::to_string(Kk) + " is not divisible by L = " +
                             std::to_string(L));
  if (2 * n_window + 1 > Kk / L)
    throw SamplingAliasError("2 n_window + 1 = " + std::to_string(2 * n_window + 1) +
                             " translates exceed Kk / L = " + std::to_string(Kk / L) +
                             " distinct frequencies");
}

PositionGrid zak_grid(const ZakParams& p) {
  p.validate();
  const double h = p.spacing();
  const Index n_points = (2 * p.n_window + 1) * p.Q;
  const double x_min = -double(p.n_window) * p.alpha;
  return PositionGrid(x_min, x_min + double(n_points - 1) * h, n_points);
}

ZakArray zak_forward(const GridFunction& H, const ZakParams& p) {
  p.validate();
  const PositionGrid& grid = H.grid;
  if (H.values.size() != grid.n_points)
    throw InvalidDimensionError("grid function length does not match its grid");
  const Index m0 = aligned_offset(grid, p);
  if (m0 > -p.n_window * p.Q || m0 + grid.n_points < (p.n_window + 1) * p.Q)
    throw AlignmentError("grid does not cover the translate window");

  ZakArray out{p, Eigen::MatrixXcd(p.Kk, p.Q)};
  const double inv_root = 1.0 / std::sqrt(p.alpha);
  parallel_for(std::size_t(p.Q), [&](std::size_t jj) {
    const Index j = Index(jj);
    std::vector<cplx> comb(std::size_t(p.Kk), cplx(0.0, 0.0));
    // Grid points congruent to j mod Q, folded by translate index n mod Kk.
    const Index first = floor_mod(j - m0, p.Q);
    for (Index idx = first; idx < grid.n_points; idx += p.Q) {
      const Index n = (m0 + idx - j) / p.Q;
      comb[std::size_t(floor_mod(n, p.Kk))] += H.values(idx);
    }
    Eigen::FFT<double> fft;
    std::vector<cplx> spec;
    fft.fwd(spec, comb);
    for (Index i = 0; i < p.Kk; ++i)
      out.values(i, j) = inv_root * spec[std::size_t((Index(p.L) * i) % p.Kk)];
  });
  return out;
}

GridFunction zak_inverse(const ZakArray& h) {
  const ZakParams& p = h.params;
  const PositionGrid grid = zak_grid(p);
  GridFunction out{grid, Eigen::VectorXcd(grid.n_points)};
  const double root = std::sqrt(p.alpha);
  parallel_for(std::size_t(p.Q), [&](std::size_t jj) {
    const Index j = Index(jj);
    std::vector<cplx> column(std::size_t(p.Kk));
    for (Index i = 0; i < p.Kk; ++i) column[std::size_t(i)] = h.values(i, j);
    Eigen::FFT<double> fft;
    std::vector<cplx> series;
    fft.inv(series, column);  // (1/Kk) sum_i e^{+2 pi i i t / Kk}
    for (Index n = -p.n_window; n <= p.n_window; ++n) {
      const Index t = floor_mod(Index(p.L) * n, p.Kk);
      out.values((n + p.n_window) * p.Q + j) = root * series[std::size_t(t)];
    }
  });
  return out;
}

cplx zak_sample(const GridFunction& H, const ZakParams& p, double k, Index m) {
  const Index m0 = aligned_offset(H.grid, p);
  cplx sum(0.0, 0.0);
  for (Index idx = floor_mod(m - m0, p.Q); idx < H.grid.n_points; idx += p.Q) {
    const Index n = (m0 + idx - m) / p.Q;
    sum += std::polar(1.0, -k * double(n) * p.alpha) * H.values(idx);
  }
  return sum / std::sqrt(p.alpha);
}

GridFunction updown_transform(const PseudoBosonSystem& sys, const StateVector& f,
                              Direction direction, const PositionGrid& grid) {
  require_regular(sys, "updown_transform");
  if (f.size() != sys.dim()) throw InvalidDimensionError("state has the wrong dimension");
  const StateVector coeffs = direction == Direction::up ? StateVector(*sys.S_inv * f)
                                                        : StateVector(*sys.S * f);
  return synthesize(coeffs, grid);
}

ZakArray kq_coefficients(const PseudoBosonSystem& sys, const StateVector& f, KqFamily family,
                         const ZakParams& params) {
  const Direction d = family == KqFamily::Psi ? Direction::up : Direction::down;
  return zak_forward(updown_transform(sys, f, d, zak_grid(params)), params);
}

StructureReport translation_action_check(const PseudoBosonSystem& sys, const StateVector& f,
                                         const ZakParams& params) {
  require_regular(sys, "translation_action_check");
  const PositionGrid grid = zak_grid(params);
  const double alpha = params.alpha;
  const FockMatrix t1 = t1_factorized(sys, alpha);
  const FockMatrix t2 = t2_factorized(sys, alpha);
  StructureReport report;

  const GridFunction fu = updown_transform(sys, f, Direction::up, grid);
  const GridFunction t1u = updown_transform(sys, t1 * f, Direction::up, grid);
  const GridFunction t2u = updown_transform(sys, t2 * f, Direction::up, grid);
  const Index band = params.Q;
  const Index inner = grid.n_points - 2 * band;
  Eigen::VectorXcd modulated(inner);
  for (Index m = 0; m < inner; ++m)
    modulated(m) = std::polar(1.0, alpha * grid.point(band + m)) * fu.values(band + m);
  report.record("t1_action", scaled_deviation(t1u.values.segment(band, inner), modulated));
  report.record("t2_action", scaled_deviation(t2u.values.segment(band, inner),
                                              fu.values.segment(0, inner)));

  const ZakArray psi = kq_coefficients(sys, f, KqFamily::Psi, params);
  const ZakArray phi = kq_coefficients(sys, f, KqFamily::Phi, params);
  const ZakArray psi_t1 = kq_coefficients(sys, t1 * f, KqFamily::Psi, params);
  const ZakArray psi_t2 = kq_coefficients(sys, t2 * f, KqFamily::Psi, params);
  const ZakArray phi_t1 = kq_coefficients(sys, t1.adjoint() * f, KqFamily::Phi, params);
  const ZakArray phi_t2 = kq_coefficients(sys, t2.adjoint() * f, KqFamily::Phi, params);
  Eigen::MatrixXcd e1(params.Kk, params.Q), e2(params.Kk, params.Q), e3(params.Kk, params.Q),
      e4(params.Kk, params.Q);
  for (Index i = 0; i < params.Kk; ++i) {
    for (Index j = 0; j < params.Q; ++j) {
      e1(i, j) = std::polar(1.0, alpha * params.q(j)) * psi.values(i, j);
      e2(i, j) = std::polar(1.0, -alpha * params.k(i)) * psi.values(i, j);
      e3(i, j) = std::polar(1.0, -alpha * params.q(j)) * phi.values(i, j);
      e4(i, j) = std::polar(1.0, alpha * params.k(i)) * phi.values(i, j);
    }
  }
  report.record("kq_t1_psi", scaled_deviation(psi_t1.values, e1));
  report.record("kq_t2_psi", scaled_deviation(psi_t2.values, e2));
  report.record("kq_t1dag_phi", scaled_deviation(phi_t1.values, e3));
  report.record("kq_t2dag_phi", scaled_deviation(phi_t2.values, e4));
  return report;
}

GridFunction fourier_transform(const GridFunction& g) {
  const PositionGrid& grid = g.grid;
  const Index M = grid.n_points;
  const double h = grid.spacing();
  const Index c = M / 2;
  const double dp = 2.0 * std::numbers::pi / (double(M) * h);

  std::vector<cplx> in(static_cast<std::size_t>(M));
  for (Index m = 0; m < M; ++m)
    in[std::size_t(m)] =
        std::polar(1.0, 2.0 * std::numbers::pi * double(c * m % M) / double(M)) * g.values(m);
  Eigen::FFT<double> fft;
  std::vector<cplx> spec;
  fft.fwd(spec, in);

  const PositionGrid pgrid(-double(c) * dp, double(M - 1 - c) * dp, M);
  GridFunction out{pgrid, Eigen::VectorXcd(M)};
  const double scale = h / std::sqrt(2.0 * std::numbers::pi);
  for (Index l = 0; l < M; ++l) {
    const double p = double(l - c) * dp;
    out.values(l) = scale * std::polar(1.0, -p * grid.x_min) * spec[std::size_t(l)];
  }
  return out;
}

GridFunction momentum_transform(const PseudoBosonSystem& sys, const StateVector& f,
                                Direction direction, const PositionGrid& grid) {
  return fourier_transform(updown_transform(sys, f, direction, grid));
}

GridFunction bandlimited_resample(const GridFunction& g, const PositionGrid& target) {
  const double h = g.grid.spacing();
  GridFunction out{target, Eigen::VectorXcd(target.n_points)};
  parallel_for(std::size_t(target.n_points), [&](std::size_t t) {
    const double x = target.point(Index(t));
    cplx acc(0.0, 0.0);
    for (Index m = 0; m < g.grid.n_points; ++m) {
      const double u = (x - g.grid.point(m)) / h;
      const double w = std::abs(u) < 1e-12 ? 1.0 : std::sin(std::numbers::pi * u) / (std::numbers::pi * u);
      acc += w * g.values(m);
    }
    out.values(Index(t)) = acc;
  });
  return out;
}

cplx grid_inner(const GridFunction& a, const GridFunction& b) {
  if (a.values.size() != b.values.size())
    throw InvalidDimensionError("grid functions live on different grids");
  return a.grid.spacing() * a.values.dot(b.values);
}

StructureReport zak_suite(const PseudoBosonSystem& sys, const ZakParams& params,
                          const ZakSuiteOptions& options) {
  require_regular(sys, "zak_suite");
  const Index dim = sys.dim();
  const Index support = std::min(options.n_modes, sys.safe_size());
  const PositionGrid grid = zak_grid(params);
  const double cell = params.alpha * params.alpha / double(params.Kk * params.Q);
  ProbeRng rng(options.seed);
  StructureReport report;

  StateVector f = rng.vector(dim, support);
  StateVector g = rng.vector(dim, support);
  f /= f.norm();
  g /= g.norm();

  const GridFunction fu = updown_transform(sys, f, Direction::up, grid);
  const GridFunction fd = updown_transform(sys, f, Direction::down, grid);
  const GridFunction gd = updown_transform(sys, g, Direction::down, grid);

  // Transform itself.
  const ZakArray zf = zak_forward(fu, params);
  report.record("zak_round_trip", scaled_deviation(zak_inverse(zf).values, fu.values));
  const double energy = grid.spacing() * fu.values.squaredNorm();
  report.record("zak_parseval", rel_gap(cell * zf.values.squaredNorm(), energy));
  const double zscale = std::max(1.0, zf.values.cwiseAbs().maxCoeff());
  for (Index i = 0; i < params.Kk; i += 7) {
    for (Index j = 0; j < params.Q; j += 5) {
      const double k = params.k(i);
      const cplx base = zak_sample(fu, params, k, j);
      const double dev_q =
          std::abs(zak_sample(fu, params, k, j + params.Q) - std::polar(1.0, k * params.alpha) * base);
      const double dev_k =
          std::abs(zak_sample(fu, params, k + 2.0 * std::numbers::pi / params.alpha, j) - base);
      const double dev_fft = std::abs(base - zf.values(i, j));
      report.record("zak_quasi_periodicity", std::max({dev_q, dev_k, dev_fft}) / zscale);
    }
  }

  report.merge(translation_action_check(sys, f, params));

  // Resolutions across the two families.
  const ZakArray psi_f = kq_coefficients(sys, f, KqFamily::Psi, params);
  const ZakArray phi_g = kq_coefficients(sys, g, KqFamily::Phi, params);
  const cplx exact = f.dot(g);
  report.record("kq_parseval",
                scaled_deviation(cplx(cell * (psi_f.values.conjugate().cwiseProduct(phi_g.values)).sum()),
                                 exact));
  report.record("updown_pairing", scaled_deviation(grid_inner(fu, gd), exact));

  // S_eta = S^2 and rho_kq = S Psi_kq = S^{-1} Phi_kq at coefficient level.
  const FockMatrix& S = *sys.S;
  const FockMatrix& S_inv = *sys.S_inv;
  const ZakArray phi_f = kq_coefficients(sys, f, KqFamily::Phi, params);
  const ZakArray plain = zak_forward(synthesize(f, grid), params);
  report.record("s_eta", scaled_deviation(
                             kq_coefficients(sys, S * (S * f), KqFamily::Psi, params).values,
                             phi_f.values));
  report.record("s_eta",
                scaled_deviation(kq_coefficients(sys, S * f, KqFamily::Psi, params).values, plain.values));
  report.record("s_eta",
                scaled_deviation(kq_coefficients(sys, S_inv * f, KqFamily::Phi, params).values,
                                 plain.values));

  // Bounded S_eta: ||f_down|| <= ||S^2|| ||f_up||.
  const Eigen::JacobiSVD<FockMatrix> svd(S * S);
  const double s2 = svd.singularValues()(0);
  const double up_norm = fu.values.norm();
  const double down_norm = fd.values.norm();
  const bool bounded = std::isfinite(up_norm) && std::isfinite(down_norm) &&
                       down_norm <= s2 * up_norm * (1.0 + 1e-9);
  report.record("prop2_bound", bounded ? 0.0 : 1.0);

  // Momentum representation.
  for (Index n = 0; n < std::min<Index>(4, dim); ++n) {
    const GridFunction ft = fourier_transform(synthesize(basis_vector(dim, n), grid));
    const Eigen::MatrixXd table = hermite_table<double>(std::max<Index>(n + 1, 2), ft.grid.points());
    const cplx eig = std::pow(cplx(0.0, -1.0), int(n));
    const Eigen::VectorXcd expected = eig * table.col(n).cast<cplx>();
    report.record("momentum_eigen", scaled_deviation(ft.values, expected));
  }
  const GridFunction fhat_up = momentum_transform(sys, f, Direction::up, grid);
  const GridFunction ghat_down = momentum_transform(sys, g, Direction::down, grid);
  report.record("momentum_parseval", scaled_deviation(grid_inner(fhat_up, ghat_down), exact));
  return report;
}

}  // namespace pbx
