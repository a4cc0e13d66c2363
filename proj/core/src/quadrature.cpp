#include "heatinv/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "heatinv/error.hpp"

namespace heatinv {

QuadratureRule gauss_legendre(std::size_t n, double a, double b) {
  if (n == 0) throw InvalidArgument("gauss_legendre: need at least one node");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const std::size_t m = (n + 1) / 2;
  for (std::size_t i = 0; i < m; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (std::size_t k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::fabs(dz) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = mid - half * z;
    rule.nodes[n - 1 - i] = mid + half * z;
    rule.weights[i] = half * w;
    rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

QuadratureRule periodic_trapezoid(std::size_t n) {
  if (n == 0) throw InvalidArgument("periodic_trapezoid: need at least one node");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.assign(n, 2.0 * std::numbers::pi / n);
  for (std::size_t k = 0; k < n; ++k) {
    rule.nodes[k] = 2.0 * std::numbers::pi * k / n;
  }
  return rule;
}

DiscRule make_disc_rule(std::size_t radial_points, std::size_t angular_points) {
  DiscRule rule{gauss_legendre(radial_points, 0.0, 1.0),
                periodic_trapezoid(angular_points)};
  for (std::size_t i = 0; i < rule.radial.size(); ++i) {
    rule.radial.weights[i] *= rule.radial.nodes[i];
  }
  return rule;
}

DiscRule default_disc_rule() { return make_disc_rule(64, 256); }

}  // namespace heatinv
