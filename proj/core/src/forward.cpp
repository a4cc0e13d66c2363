#include "heatinv/forward.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "heatinv/angles.hpp"
#include "heatinv/error.hpp"

namespace heatinv {
namespace {

// 1 - e^{-x} without cancellation for small x.
inline double decay_gap(double x) { return -std::expm1(-x); }

// Exact bits-to-double mapping so datasets are reproducible across standard
// libraries (std::uniform_real_distribution is implementation-defined).
inline double unit_uniform(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

double draw(std::mt19937_64& gen, NoiseModel model) {
  if (model == NoiseModel::Uniform) return 2.0 * unit_uniform(gen) - 1.0;
  // Box-Muller, sigma = 1/2, clipped to [-1, 1].
  double u1 = unit_uniform(gen);
  const double u2 = unit_uniform(gen);
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  return std::clamp(0.5 * z, -1.0, 1.0);
}

}  // namespace

TimeGrid::TimeGrid(double horizon, double step) : horizon_(horizon), step_(step) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw InvalidArgument("TimeGrid: horizon T must be positive");
  }
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw InvalidArgument("TimeGrid: step dt must be positive");
  }
  const double ratio = horizon / step;
  const double rounded = std::round(ratio);
  if (std::fabs(ratio - rounded) > 1e-9 || rounded < 1.0) {
    std::ostringstream msg;
    msg << "TimeGrid: T / dt = " << ratio << " is not an integer";
    throw InvalidArgument(msg.str());
  }
  samples_ = static_cast<std::size_t>(rounded);
}

void FluxDataset::validate() const {
  if (angles.empty()) throw DataError("FluxDataset: no observation angles");
  if (values.rows() != static_cast<Eigen::Index>(angles.size()) ||
      values.cols() != static_cast<Eigen::Index>(grid.size())) {
    std::ostringstream msg;
    msg << "FluxDataset: values are " << values.rows() << "x" << values.cols()
        << " but expected " << angles.size() << "x" << grid.size();
    throw DataError(msg.str());
  }
  if (!values.allFinite()) throw DataError("FluxDataset: non-finite flux value");
}

Eigen::VectorXd FluxDataset::stacked() const { return stack_rows(values); }

Eigen::VectorXd stack_rows(const Eigen::MatrixXd& values) {
  Eigen::VectorXd out(values.size());
  const Eigen::Index cols = values.cols();
  for (Eigen::Index l = 0; l < values.rows(); ++l) {
    out.segment(l * cols, cols) = values.row(l).transpose();
  }
  return out;
}

Eigen::MatrixXd unstack_rows(const Eigen::VectorXd& stacked, std::size_t rows) {
  const auto r = static_cast<Eigen::Index>(rows);
  if (r == 0 || stacked.size() % r != 0) {
    throw InvalidArgument("unstack_rows: length is not a multiple of the row count");
  }
  const Eigen::Index cols = stacked.size() / r;
  Eigen::MatrixXd out(r, cols);
  for (Eigen::Index l = 0; l < r; ++l) {
    out.row(l) = stacked.segment(l * cols, cols).transpose();
  }
  return out;
}

double flux_exact(const SpectralSource& p, const StepSource& q, double theta, double t,
                  const EigenBasis& basis) {
  if (p.size() > basis.size()) {
    throw InvalidArgument("flux_exact: source has more coefficients than the basis");
  }
  if (!(t >= 0.0)) throw InvalidArgument("flux_exact: negative time");
  double flux = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) {
    const auto& pair = basis[n];
    double conv = 0.0;  // lambda * int_0^t e^{-lambda (t - tau)} q(tau) dtau
    for (const auto& s : q.steps()) {
      if (!(s.onset < t)) break;
      conv += s.height * decay_gap(pair.lambda * (t - s.onset));
    }
    flux -= coeff_a(pair, theta) * p.coeffs[static_cast<Eigen::Index>(n)] * conv;
  }
  return flux;
}

Eigen::MatrixXd assemble_p_operator(const StepSource& q, std::span<const double> angles,
                                    const TimeGrid& grid, const EigenBasis& basis,
                                    std::size_t n_modes) {
  if (n_modes > basis.size()) {
    throw InvalidArgument("assemble_p_operator: n_modes exceeds the basis size");
  }
  const auto samples = static_cast<Eigen::Index>(grid.size());
  const auto n_angles = static_cast<Eigen::Index>(angles.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n_angles * samples,
                                              static_cast<Eigen::Index>(n_modes));
  // Temporal factor is angle independent: build it once per mode.
  Eigen::VectorXd temporal(samples);
  for (std::size_t n = 0; n < n_modes; ++n) {
    const auto& pair = basis[n];
    for (Eigen::Index i = 0; i < samples; ++i) {
      const double t = grid.time(static_cast<std::size_t>(i) + 1);
      double conv = 0.0;
      for (const auto& s : q.steps()) {
        if (!(s.onset < t)) break;
        conv += s.height * decay_gap(pair.lambda * (t - s.onset));
      }
      temporal[i] = conv;
    }
    for (Eigen::Index l = 0; l < n_angles; ++l) {
      const double a = coeff_a(pair, angles[static_cast<std::size_t>(l)]);
      out.col(static_cast<Eigen::Index>(n)).segment(l * samples, samples) = -a * temporal;
    }
  }
  return out;
}

Eigen::MatrixXd assemble_q_operator(const SpectralSource& p, std::span<const double> angles,
                                    const TimeGrid& grid, const EigenBasis& basis) {
  if (p.size() > basis.size()) {
    throw InvalidArgument("assemble_q_operator: source has more coefficients than the basis");
  }
  const auto samples = static_cast<Eigen::Index>(grid.size());
  const auto n_angles = static_cast<Eigen::Index>(angles.size());
  const double dt = grid.step();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n_angles * samples, samples);

  for (Eigen::Index l = 0; l < n_angles; ++l) {
    const double theta = angles[static_cast<std::size_t>(l)];
    // kernel[d] = -sum_n a_n p_n (e^{-lambda d dt} - e^{-lambda (d+1) dt}).
    Eigen::VectorXd kernel = Eigen::VectorXd::Zero(samples);
    for (std::size_t n = 0; n < p.size(); ++n) {
      const double coeff = p.coeffs[static_cast<Eigen::Index>(n)];
      if (coeff == 0.0) continue;
      const auto& pair = basis[n];
      const double weight = -coeff_a(pair, theta) * coeff * decay_gap(pair.lambda * dt);
      for (Eigen::Index d = 0; d < samples; ++d) {
        kernel[d] += weight * std::exp(-pair.lambda * static_cast<double>(d) * dt);
      }
    }
    for (Eigen::Index i = 0; i < samples; ++i) {
      for (Eigen::Index j = 0; j <= i; ++j) {
        out(l * samples + i, j) = kernel[i - j];
      }
    }
  }
  return out;
}

Eigen::MatrixXd clean_flux(const SpectralSource& p, const StepSource& q,
                           std::span<const double> angles, const TimeGrid& grid,
                           const EigenBasis& basis) {
  const Eigen::MatrixXd op = assemble_p_operator(q, angles, grid, basis, p.size());
  return unstack_rows(op * p.coeffs, angles.size());
}

Eigen::MatrixXd perturb(const Eigen::MatrixXd& clean, double delta, std::uint64_t seed,
                        NoiseModel noise) {
  if (!(delta >= 0.0 && delta < 1.0)) {
    throw InvalidArgument("synthesize: noise level must lie in [0, 1)");
  }
  Eigen::MatrixXd out = clean;
  if (delta == 0.0) return out;
  std::mt19937_64 gen(seed);
  for (Eigen::Index l = 0; l < out.rows(); ++l) {
    for (Eigen::Index i = 0; i < out.cols(); ++i) {
      out(l, i) = clean(l, i) * (1.0 + delta * draw(gen, noise));
    }
  }
  return out;
}

FluxDataset synthesize(const SpectralSource& p, const StepSource& q,
                       std::span<const double> angles, const TimeGrid& grid,
                       const EigenBasis& basis, double delta, std::uint64_t seed,
                       NoiseModel noise) {
  if (!(delta >= 0.0 && delta < 1.0)) {
    throw InvalidArgument("synthesize: noise level must lie in [0, 1)");
  }
  FluxDataset data;
  data.angles.assign(angles.begin(), angles.end());
  data.grid = grid;
  data.noise_level = delta;
  data.seed = seed;
  data.noise = noise;
  data.values = perturb(clean_flux(p, q, angles, grid, basis), delta, seed, noise);
  return data;
}

std::size_t default_truncation(double dt, double delta, const EigenBasis& basis) {
  if (delta == 0.0) return basis.size();
  return usable_mode_count(dt, delta, basis);
}

}  // namespace heatinv
