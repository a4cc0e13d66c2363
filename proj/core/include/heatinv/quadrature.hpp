#pragma once

#include <cstddef>
#include <vector>

namespace heatinv {

/// Nodes and weights of a 1-D rule on an interval.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule mapped to [a, b]. Exact for polynomials of
/// degree <= 2n - 1.
QuadratureRule gauss_legendre(std::size_t n, double a = 0.0, double b = 1.0);

/// n-point periodic trapezoid rule on [0, 2*pi). Exact for trigonometric
/// polynomials of degree < n.
QuadratureRule periodic_trapezoid(std::size_t n);

/// Tensor-product rule on the unit disc in polar coordinates. The radial
/// weights already include the Jacobian r, so
///   integral over disc of f ~= sum_i sum_k radial.weights[i] *
///   angular.weights[k] * f(radial.nodes[i], angular.nodes[k]).
struct DiscRule {
  QuadratureRule radial;
  QuadratureRule angular;

  template <typename F>
  double integrate(F&& f) const {
    double total = 0.0;
    for (std::size_t i = 0; i < radial.size(); ++i) {
      double ring = 0.0;
      for (std::size_t k = 0; k < angular.size(); ++k) {
        ring += angular.weights[k] * f(radial.nodes[i], angular.nodes[k]);
      }
      total += radial.weights[i] * ring;
    }
    return total;
  }
};

/// Default disc rule: 64 Gauss-Legendre nodes in r, 256 trapezoid nodes in
/// theta.
DiscRule default_disc_rule();
DiscRule make_disc_rule(std::size_t radial_points, std::size_t angular_points);

}  // namespace heatinv
