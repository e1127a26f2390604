#include "pbx/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace pbx {

GaussLegendre gauss_legendre(Index n) {
  if (n < 1) throw InvalidDimensionError("gauss_legendre needs n >= 1");
  // (P_n(x), P_n'(x)) by the three-term recurrence.
  auto legendre = [n](double x) {
    double p0 = 1.0;
    double p1 = x;
    for (Index k = 2; k <= n; ++k) {
      const double pk = ((2.0 * double(k) - 1.0) * x * p1 - (double(k) - 1.0) * p0) / double(k);
      p0 = p1;
      p1 = pk;
    }
    return std::pair{p1, double(n) * (x * p1 - p0) / (x * x - 1.0)};
  };

  GaussLegendre rule{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  const Index half = (n + 1) / 2;
  for (Index i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (double(i) + 0.75) / (double(n) + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(x);
      const double step = p / dp;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    const double dp = legendre(x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes(n - 1 - i) = x;
    rule.nodes(i) = -x;
    rule.weights(i) = w;
    rule.weights(n - 1 - i) = w;
  }
  if (n % 2 == 1) rule.nodes(half - 1) = 0.0;
  return rule;
}

DiscQuadrature::DiscQuadrature(double r, Index nr, Index na)
    : radius(r), n_radial(nr), n_angular(na) {
  if (!(r > 0.0) || !std::isfinite(r)) throw NumericInputError("disc radius must be positive");
  if (nr < 4) throw InvalidDimensionError("disc quadrature needs n_radial >= 4");
  if (na < 8) throw InvalidDimensionError("disc quadrature needs n_angular >= 8");
}

double DiscQuadrature::default_radius(Index dim) { return 0.75 * std::sqrt(2.0 * double(dim)); }

DiscQuadrature::Nodes DiscQuadrature::nodes() const {
  const GaussLegendre gl = gauss_legendre(n_radial);
  const Index total = n_radial * n_angular;
  Nodes out{Eigen::VectorXcd(total), Eigen::VectorXd(total)};
  const double dtheta = 2.0 * std::numbers::pi / double(n_angular);
  Index idx = 0;
  for (Index i = 0; i < n_radial; ++i) {
    const double r = 0.5 * radius * (gl.nodes(i) + 1.0);
    const double wr = 0.5 * radius * gl.weights(i) * r;
    for (Index j = 0; j < n_angular; ++j, ++idx) {
      out.z(idx) = std::polar(r, dtheta * double(j));
      out.w(idx) = wr * dtheta;
    }
  }
  return out;
}

}  // namespace pbx
