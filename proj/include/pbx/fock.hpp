#pragma once

// Truncated Fock-space carriers: ladder and quadrature operators, Hermite
// functions on a position grid, and the matrix exponential. Everything here is
// header-only and templated on the real scalar type.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "pbx/error.hpp"

namespace pbx {

using Index = Eigen::Index;

template <typename Scalar>
using FockMatrixT =
    Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using StateVectorT = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

using cplx = std::complex<double>;
using FockMatrix = FockMatrixT<double>;
using StateVector = StateVectorT<double>;

inline void require_dim(Index dim) {
  if (dim < 2)
    throw InvalidDimensionError("truncation dimension must be >= 2, got " +
                                std::to_string(dim));
}

template <typename Scalar = double>
struct LadderPair {
  FockMatrixT<Scalar> c;
  FockMatrixT<Scalar> c_dag;
};

/// Truncated annihilation operator c (sqrt(n+1) on the superdiagonal) and its
/// adjoint.
template <typename Scalar = double>
LadderPair<Scalar> ladder_matrices(Index dim) {
  require_dim(dim);
  FockMatrixT<Scalar> c = FockMatrixT<Scalar>::Zero(dim, dim);
  for (Index n = 0; n + 1 < dim; ++n) c(n, n + 1) = std::sqrt(Scalar(n + 1));
  FockMatrixT<Scalar> c_dag = c.adjoint();
  return {std::move(c), std::move(c_dag)};
}

/// Truncated coherent-state coordinates exp(-|z|^2/2) z^k / sqrt(k!), k < dim.
template <typename Scalar = double>
StateVectorT<Scalar> coherent_coefficients(std::complex<Scalar> z, Index dim) {
  require_dim(dim);
  StateVectorT<Scalar> v(dim);
  v(0) = std::exp(-std::norm(z) / Scalar(2));
  for (Index k = 1; k < dim; ++k) v(k) = v(k - 1) * z / std::sqrt(Scalar(k));
  return v;
}

template <typename Scalar = double>
struct QuadraturePair {
  FockMatrixT<Scalar> x0;
  FockMatrixT<Scalar> p0;
};

/// x0 = (c + c^dag)/sqrt(2), p0 = (c - c^dag)/(i sqrt(2)).
template <typename Scalar = double>
QuadraturePair<Scalar> quadrature_matrices(Index dim) {
  const auto [c, c_dag] = ladder_matrices<Scalar>(dim);
  const Scalar inv_sqrt2 = Scalar(1) / std::sqrt(Scalar(2));
  const std::complex<Scalar> minus_i(0, -1);
  FockMatrixT<Scalar> x0 = (c + c_dag) * inv_sqrt2;
  FockMatrixT<Scalar> p0 = (c - c_dag) * (minus_i * inv_sqrt2);
  return {std::move(x0), std::move(p0)};
}

/// Uniform grid on [x_min, x_max] with n_points samples, endpoints included.
struct PositionGrid {
  double x_min = 0.0;
  double x_max = 1.0;
  Index n_points = 2;

  PositionGrid() = default;
  PositionGrid(double lo, double hi, Index n) : x_min(lo), x_max(hi), n_points(n) {
    if (n < 2) throw InvalidDimensionError("position grid needs >= 2 points");
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi))
      throw NumericInputError("position grid requires finite x_min < x_max");
  }

  double spacing() const { return (x_max - x_min) / double(n_points - 1); }
  double point(Index i) const { return x_min + double(i) * spacing(); }

  Eigen::VectorXd points() const {
    Eigen::VectorXd x(n_points);
    for (Index i = 0; i < n_points; ++i) x(i) = point(i);
    return x;
  }

  /// Largest spacing that still resolves the top retained Hermite mode.
  static double recommended_spacing(Index dim) {
    return std::numbers::pi / (2.0 * std::sqrt(2.0 * double(dim) + 1.0));
  }

  /// [-L, L] with L = sqrt(2 dim) + 4 and 8 dim points.
  static PositionGrid default_for(Index dim) {
    require_dim(dim);
    const double half = std::sqrt(2.0 * double(dim)) + 4.0;
    return PositionGrid(-half, half, 8 * dim);
  }
};

struct GridFunction {
  PositionGrid grid;
  Eigen::VectorXcd values;
};

/// Normalized Hermite functions e_n(x), n < dim, evaluated at the given
/// points. Row i holds x_i, column n holds mode n. The three-term recurrence
/// runs on the polynomial part with running rescaling, and the Gaussian factor
/// is applied last, so neither overflow nor premature underflow occurs.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> hermite_table(
    Index dim, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x) {
  require_dim(dim);
  using std::exp;
  using std::log;
  using std::sqrt;
  constexpr Scalar kBig = Scalar(1e100);
  const Scalar log_big = log(kBig);
  const Scalar norm0 = Scalar(1) / sqrt(sqrt(std::numbers::pi_v<Scalar>));

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(x.size(), dim);
  for (Index i = 0; i < x.size(); ++i) {
    const Scalar xi = x(i);
    Scalar log_scale = -xi * xi / Scalar(2);
    Scalar prev = 0;
    Scalar cur = norm0;
    out(i, 0) = cur * exp(log_scale);
    for (Index n = 0; n + 1 < dim; ++n) {
      const Scalar np1 = Scalar(n + 1);
      Scalar next = sqrt(Scalar(2) / np1) * xi * cur - sqrt(Scalar(n) / np1) * prev;
      prev = cur;
      cur = next;
      if (std::abs(cur) > kBig) {
        cur /= kBig;
        prev /= kBig;
        log_scale += log_big;
      }
      out(i, n + 1) = cur * exp(log_scale);
    }
  }
  return out;
}

struct HermiteBasis {
  std::vector<GridFunction> modes;
  std::optional<std::string> resolution_warning;
};

/// e_0 .. e_{dim-1} sampled on `grid`.
inline HermiteBasis hermite_grid(Index dim, const PositionGrid& grid) {
  const Eigen::MatrixXd table = hermite_table<double>(dim, grid.points());
  HermiteBasis basis;
  basis.modes.reserve(std::size_t(dim));
  for (Index n = 0; n < dim; ++n)
    basis.modes.push_back({grid, table.col(n).cast<cplx>()});
  if (grid.spacing() > PositionGrid::recommended_spacing(dim))
    basis.resolution_warning =
        "grid spacing " + std::to_string(grid.spacing()) +
        " exceeds recommended " +
        std::to_string(PositionGrid::recommended_spacing(dim)) +
        " for dim " + std::to_string(dim);
  return basis;
}

/// Grid values of sum_n coeffs_n e_n(x).
inline GridFunction synthesize(const StateVector& coeffs, const PositionGrid& grid) {
  const Eigen::MatrixXd table = hermite_table<double>(coeffs.size(), grid.points());
  Eigen::VectorXcd values(grid.n_points);
  values.real() = table * coeffs.real();
  values.imag() = table * coeffs.imag();
  return {grid, std::move(values)};
}

template <typename Scalar>
bool is_certified_normal(const FockMatrixT<Scalar>& m, Scalar rel_tol = Scalar(1e-12)) {
  const FockMatrixT<Scalar> comm = m * m.adjoint() - m.adjoint() * m;
  const Scalar scale = std::max(Scalar(1), m.squaredNorm());
  return comm.cwiseAbs().maxCoeff() < rel_tol * scale;
}

/// exp(M). Scaling-and-squaring Pade by default; certified-normal Hermitian or
/// skew-Hermitian inputs go through a unitary eigendecomposition instead.
template <typename Scalar>
FockMatrixT<Scalar> matrix_exp(const FockMatrixT<Scalar>& m) {
  if (m.rows() != m.cols())
    throw InvalidDimensionError("matrix_exp needs a square matrix");
  if (!m.allFinite()) throw NumericInputError("matrix_exp: non-finite entries");
  if (m.rows() == 0) return m;

  const Scalar tiny = Scalar(64) * Eigen::NumTraits<Scalar>::epsilon() *
                      std::max(Scalar(1), m.cwiseAbs().maxCoeff());
  if (is_certified_normal<Scalar>(m)) {
    const bool hermitian = (m - m.adjoint()).cwiseAbs().maxCoeff() <= tiny;
    const bool skew = (m + m.adjoint()).cwiseAbs().maxCoeff() <= tiny;
    if (hermitian || skew) {
      const std::complex<Scalar> i(0, 1);
      const FockMatrixT<Scalar> h = hermitian ? FockMatrixT<Scalar>((m + m.adjoint()) / Scalar(2))
                                              : FockMatrixT<Scalar>((m - m.adjoint()) / (Scalar(2) * i));
      Eigen::SelfAdjointEigenSolver<FockMatrixT<Scalar>> es(h);
      StateVectorT<Scalar> d(h.rows());
      for (Index k = 0; k < h.rows(); ++k) {
        const Scalar lam = es.eigenvalues()(k);
        d(k) = hermitian ? std::complex<Scalar>(std::exp(lam), 0) : std::exp(i * lam);
      }
      return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
    }
  }
  FockMatrixT<Scalar> out = m.exp();
  return out;
}

}  // namespace pbx
