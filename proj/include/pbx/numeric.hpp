#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <cstdint>
#include <random>
#include <span>

#include "pbx/fock.hpp"

namespace pbx {

/// Fixed-order pairwise summation; the result does not depend on how the
/// terms were produced.
template <typename T>
T pairwise_sum(std::span<const T> terms) {
  if (terms.empty()) return T{};
  if (terms.size() <= 8) {
    T acc{};
    for (const T& t : terms) acc += t;
    return acc;
  }
  const std::size_t half = terms.size() / 2;
  return pairwise_sum(terms.first(half)) + pairwise_sum(terms.subspan(half));
}

/// max|actual - expected| / max(1, max|expected|).
template <typename A, typename B>
double scaled_deviation(const Eigen::MatrixBase<A>& actual, const Eigen::MatrixBase<B>& expected) {
  if (actual.size() == 0) return 0.0;
  const double diff = (actual - expected).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, double(expected.cwiseAbs().maxCoeff()));
  return diff / scale;
}

inline double scaled_deviation(cplx actual, cplx expected) {
  return std::abs(actual - expected) / std::max(1.0, std::abs(expected));
}

/// Deterministic probe vectors. Uniform doubles are built from raw 64-bit draws
/// so the stream is identical across standard libraries.
class ProbeRng {
 public:
  explicit ProbeRng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

  /// Complex entries uniform in [-1,1]^2 on the first `support` modes.
  StateVector vector(Index dim, Index support) {
    StateVector v = StateVector::Zero(dim);
    for (Index k = 0; k < std::min(dim, support); ++k) {
      const double re = 2.0 * uniform() - 1.0;
      const double im = 2.0 * uniform() - 1.0;
      v(k) = cplx(re, im);
    }
    return v;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pbx
