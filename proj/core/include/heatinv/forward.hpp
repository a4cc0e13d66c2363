#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "heatinv/eigensystem.hpp"
#include "heatinv/sources.hpp"

namespace heatinv {

/// Uniform sampling t_i = i * dt, i = 1..T/dt, of the horizon [0, T].
class TimeGrid {
 public:
  TimeGrid() = default;
  /// Throws InvalidArgument unless T / dt is an integer to within 1e-9.
  TimeGrid(double horizon, double step);

  double horizon() const { return horizon_; }
  double step() const { return step_; }
  std::size_t size() const { return samples_; }
  /// t_i for i in 1..size().
  double time(std::size_t i) const { return static_cast<double>(i) * step_; }

 private:
  double horizon_ = 0.0;
  double step_ = 0.0;
  std::size_t samples_ = 0;
};

enum class NoiseModel {
  Uniform,          // xi ~ U[-1, 1]
  ClippedGaussian,  // xi ~ N(0, 1/4) clipped to [-1, 1]
};

/// Boundary flux samples g[l][i] = d_n u(theta_l, t_i), possibly perturbed.
struct FluxDataset {
  std::vector<double> angles;
  TimeGrid grid;
  Eigen::MatrixXd values;  // angles.size() x grid.size()
  double noise_level = 0.0;
  std::uint64_t seed = 0;
  NoiseModel noise = NoiseModel::Uniform;

  /// Throws DataError when dimensions disagree.
  void validate() const;
  /// Row-major stacking, entry l * grid.size() + (i - 1).
  Eigen::VectorXd stacked() const;
};

Eigen::VectorXd stack_rows(const Eigen::MatrixXd& values);
Eigen::MatrixXd unstack_rows(const Eigen::VectorXd& stacked, std::size_t rows);

/// -sum_n a_n(theta) lambda_n p_n int_0^t e^{-lambda_n (t - tau)} q(tau) dtau,
/// with the time integral evaluated in closed form for the step source.
double flux_exact(const SpectralSource& p, const StepSource& q, double theta, double t,
                  const EigenBasis& basis);

/// F[q]: maps the first n_modes coefficients of p to stacked flux samples.
/// Rows are ordered (angle, time); exact in time.
Eigen::MatrixXd assemble_p_operator(const StepSource& q, std::span<const double> angles,
                                    const TimeGrid& grid, const EigenBasis& basis,
                                    std::size_t n_modes);

/// F[p]: maps q, piecewise constant on the cells [t_{j-1}, t_j], to stacked
/// flux samples. Cell integrals are exact; the matrix is block lower
/// triangular (causal) and Toeplitz within each angle block.
Eigen::MatrixXd assemble_q_operator(const SpectralSource& p, std::span<const double> angles,
                                    const TimeGrid& grid, const EigenBasis& basis);

/// Clean flux as an angles x samples matrix.
Eigen::MatrixXd clean_flux(const SpectralSource& p, const StepSource& q,
                           std::span<const double> angles, const TimeGrid& grid,
                           const EigenBasis& basis);

/// Multiplicative noise g_delta = g (1 + delta xi) with xi in [-1, 1] drawn
/// from a 64-bit Mersenne twister seeded with `seed`, angle-major order.
/// delta must lie in [0, 1).
FluxDataset synthesize(const SpectralSource& p, const StepSource& q,
                       std::span<const double> angles, const TimeGrid& grid,
                       const EigenBasis& basis, double delta, std::uint64_t seed,
                       NoiseModel noise = NoiseModel::Uniform);

/// Applies the noise model to an existing clean matrix.
Eigen::MatrixXd perturb(const Eigen::MatrixXd& clean, double delta, std::uint64_t seed,
                        NoiseModel noise = NoiseModel::Uniform);

/// Modes whose one-step decay e^{-lambda dt} stays at or above delta / 10.
/// delta = 0 keeps the whole basis.
std::size_t default_truncation(double dt, double delta, const EigenBasis& basis);

}  // namespace heatinv
