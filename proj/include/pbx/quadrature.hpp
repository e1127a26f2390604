#pragma once

#include <Eigen/Dense>

#include "pbx/fock.hpp"

namespace pbx {

struct GaussLegendre {
  Eigen::VectorXd nodes;    // ascending, in (-1, 1)
  Eigen::VectorXd weights;  // sum to 2
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
GaussLegendre gauss_legendre(Index n);

/// Polar product rule on the disc |z| <= radius: Gauss-Legendre in r (with the
/// r dr Jacobian folded into the weights) times the uniform trapezoid in angle.
struct DiscQuadrature {
  double radius = 1.0;
  Index n_radial = 4;
  Index n_angular = 8;

  DiscQuadrature() = default;
  DiscQuadrature(double radius, Index n_radial, Index n_angular);

  /// R = 0.75 sqrt(2 dim).
  static double default_radius(Index dim);

  struct Nodes {
    Eigen::VectorXcd z;
    Eigen::VectorXd w;  // sum to pi R^2
  };
  Nodes nodes() const;
};

}  // namespace pbx
