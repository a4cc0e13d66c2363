#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "heatinv/eigensystem.hpp"
#include "heatinv/quadrature.hpp"

namespace heatinv {

/// One Heaviside step q_k H(t - c_k).
struct Step {
  double onset = 0.0;   // c_k >= 0
  double height = 0.0;  // q_k != 0
};

/// Temporal source q(t) = sum_k q_k H(t - c_k) with H(0) = 1.
///
/// Onsets are strictly increasing with minimum spacing eta; every height is
/// nonzero. The piecewise-constant levels beta_k = q_1 + ... + q_k are
/// available through levels().
class StepSource {
 public:
  StepSource() = default;
  /// eta defaults to the smallest onset gap (infinity for a single step).
  explicit StepSource(std::vector<Step> steps);
  StepSource(std::vector<Step> steps, double eta);

  /// Piecewise-constant q with value levels[i] on [onsets[i], onsets[i+1]).
  /// Equal consecutive levels are merged.
  static StepSource from_levels(const std::vector<double>& onsets,
                                const std::vector<double>& levels);

  /// q that equals cells[j] on [j*dt, (j+1)*dt); zero-height jumps are dropped.
  static StepSource from_cells(const Eigen::VectorXd& cells, double dt);

  double operator()(double t) const { return evaluate(t); }
  double evaluate(double t) const;

  const std::vector<Step>& steps() const { return steps_; }
  double eta() const { return eta_; }
  bool empty() const { return steps_.empty(); }
  std::vector<double> levels() const;
  double sup_norm() const;

  /// Averages of q over [j*dt, (j+1)*dt], j = 0..cells-1.
  Eigen::VectorXd cell_averages(double dt, std::size_t cells) const;

  StepSource scaled(double factor) const;

 private:
  std::vector<Step> steps_;
  double eta_ = 0.0;
};

/// Spatial source p in S_N, stored as coefficients p_n = <p, phi_n> over the
/// first N pairs of an EigenBasis.
struct SpectralSource {
  Eigen::VectorXd coeffs;

  std::size_t size() const { return static_cast<std::size_t>(coeffs.size()); }
  /// p(r, theta) synthesized from the coefficients.
  double evaluate(const EigenBasis& basis, double r, double theta) const;
};

/// ||p||_{L2(disc)}; the basis is orthonormal so this is the Euclidean norm.
double source_norm(const SpectralSource& p);

/// Indicator of the star-shaped region r <= r(theta) with
///   r(theta) = a0 + sum_k (c_k cos k theta + s_k sin k theta).
class StarSource {
 public:
  static constexpr std::size_t kCheckPoints = 720;

  StarSource() = default;
  StarSource(double a0, std::vector<double> cos_coeffs, std::vector<double> sin_coeffs);

  /// Parameter vector layout: (a0, c_1, s_1, c_2, s_2, ..., c_K, s_K).
  static StarSource from_params(const Eigen::VectorXd& params);
  Eigen::VectorXd params() const;

  static StarSource circle(double radius, std::size_t harmonics);

  double radius(double theta) const;
  /// 0 < r(theta) < 1 for every theta: grid samples (720 and finer) plus a
  /// derivative bound between them. Shapes within ~1e-5 of the limits may be
  /// rejected.
  bool is_valid() const;

  double a0() const { return a0_; }
  const std::vector<double>& cos_coeffs() const { return cos_; }
  const std::vector<double>& sin_coeffs() const { return sin_; }
  std::size_t harmonics() const { return cos_.size(); }

 private:
  double a0_ = 0.0;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

/// Projection of a star-shaped indicator onto the first n_modes eigenpairs
/// (all of them when n_modes is 0):
///   p_n = omega_n int_0^{2pi} trig(m theta) int_0^{r(theta)} J_m(sqrt(lambda) rho) rho drho dtheta
/// with a periodic trapezoid rule in theta and Gauss-Legendre in rho.
SpectralSource project_star(const StarSource& shape, const EigenBasis& basis,
                            std::size_t n_modes = 0);

struct StarProjectionRule {
  std::size_t angular_points = 256;
  std::size_t radial_points = 32;
};
SpectralSource project_star(const StarSource& shape, const EigenBasis& basis,
                            std::size_t n_modes, const StarProjectionRule& rule);

/// Projection of the constant function 1 (only m = 0 modes are nonzero).
SpectralSource project_constant(const EigenBasis& basis, std::size_t n_modes);

}  // namespace heatinv
