#include "heatinv/sources.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "heatinv/bessel.hpp"
#include "heatinv/error.hpp"

namespace heatinv {
namespace {

double min_gap(const std::vector<Step>& steps) {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < steps.size(); ++k) {
    gap = std::min(gap, steps[k].onset - steps[k - 1].onset);
  }
  return gap;
}

}  // namespace

StepSource::StepSource(std::vector<Step> steps) : StepSource(steps, min_gap(steps)) {}

StepSource::StepSource(std::vector<Step> steps, double eta)
    : steps_(std::move(steps)), eta_(eta) {
  if (!(eta_ > 0.0)) throw InvalidArgument("StepSource: eta must be positive");
  for (std::size_t k = 0; k < steps_.size(); ++k) {
    const auto& s = steps_[k];
    if (!std::isfinite(s.onset) || !std::isfinite(s.height)) {
      throw InvalidArgument("StepSource: non-finite step");
    }
    if (s.onset < 0.0) throw InvalidArgument("StepSource: negative onset");
    if (s.height == 0.0) {
      throw InvalidArgument("StepSource: step " + std::to_string(k + 1) +
                            " has zero height");
    }
    if (k > 0 && !(s.onset - steps_[k - 1].onset >= eta_)) {
      std::ostringstream msg;
      msg << "StepSource: onsets " << steps_[k - 1].onset << " and " << s.onset
          << " are closer than eta = " << eta_ << " or out of order";
      throw InvalidArgument(msg.str());
    }
  }
}

StepSource StepSource::from_levels(const std::vector<double>& onsets,
                                   const std::vector<double>& levels) {
  if (onsets.size() != levels.size()) {
    throw InvalidArgument("StepSource::from_levels: size mismatch");
  }
  std::vector<Step> steps;
  double previous = 0.0;
  for (std::size_t i = 0; i < onsets.size(); ++i) {
    const double jump = levels[i] - previous;
    if (jump != 0.0) steps.push_back({onsets[i], jump});
    previous = levels[i];
  }
  return StepSource(std::move(steps));
}

StepSource StepSource::from_cells(const Eigen::VectorXd& cells, double dt) {
  std::vector<double> onsets(static_cast<std::size_t>(cells.size()));
  std::vector<double> levels(onsets.size());
  for (std::size_t j = 0; j < onsets.size(); ++j) {
    onsets[j] = static_cast<double>(j) * dt;
    levels[j] = cells[static_cast<Eigen::Index>(j)];
  }
  return from_levels(onsets, levels);
}

double StepSource::evaluate(double t) const {
  if (!(t >= 0.0)) throw InvalidArgument("StepSource: negative time");
  double value = 0.0;
  for (const auto& s : steps_) {
    if (s.onset > t) break;
    value += s.height;
  }
  return value;
}

std::vector<double> StepSource::levels() const {
  std::vector<double> beta;
  beta.reserve(steps_.size());
  double running = 0.0;
  for (const auto& s : steps_) {
    running += s.height;
    beta.push_back(running);
  }
  return beta;
}

double StepSource::sup_norm() const {
  double sup = 0.0;
  for (double b : levels()) sup = std::max(sup, std::fabs(b));
  return sup;
}

Eigen::VectorXd StepSource::cell_averages(double dt, std::size_t cells) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cells));
  for (std::size_t j = 0; j < cells; ++j) {
    const double lo = static_cast<double>(j) * dt;
    const double hi = static_cast<double>(j + 1) * dt;
    double integral = 0.0;
    for (const auto& s : steps_) {
      if (s.onset >= hi) break;
      integral += s.height * (hi - std::max(lo, s.onset));
    }
    out[static_cast<Eigen::Index>(j)] = integral / dt;
  }
  return out;
}

StepSource StepSource::scaled(double factor) const {
  if (factor == 0.0) throw InvalidArgument("StepSource::scaled: zero factor");
  auto steps = steps_;
  for (auto& s : steps) s.height *= factor;
  return StepSource(std::move(steps), eta_);
}

double SpectralSource::evaluate(const EigenBasis& basis, double r, double theta) const {
  if (size() > basis.size()) {
    throw InvalidArgument("SpectralSource: more coefficients than basis pairs");
  }
  double value = 0.0;
  for (std::size_t n = 0; n < size(); ++n) {
    value += coeffs[static_cast<Eigen::Index>(n)] * eigenfunction_eval(basis[n], r, theta);
  }
  return value;
}

double source_norm(const SpectralSource& p) { return p.coeffs.norm(); }

StarSource::StarSource(double a0, std::vector<double> cos_coeffs,
                       std::vector<double> sin_coeffs)
    : a0_(a0), cos_(std::move(cos_coeffs)), sin_(std::move(sin_coeffs)) {
  if (cos_.size() != sin_.size()) {
    throw InvalidArgument("StarSource: cos/sin coefficient counts differ");
  }
}

StarSource StarSource::from_params(const Eigen::VectorXd& params) {
  if (params.size() < 1 || params.size() % 2 == 0) {
    throw InvalidArgument("StarSource: parameter vector must have odd length 1 + 2K");
  }
  const std::size_t harmonics = static_cast<std::size_t>(params.size() - 1) / 2;
  std::vector<double> c(harmonics), s(harmonics);
  for (std::size_t k = 0; k < harmonics; ++k) {
    c[k] = params[static_cast<Eigen::Index>(1 + 2 * k)];
    s[k] = params[static_cast<Eigen::Index>(2 + 2 * k)];
  }
  return StarSource(params[0], std::move(c), std::move(s));
}

Eigen::VectorXd StarSource::params() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(1 + 2 * cos_.size()));
  out[0] = a0_;
  for (std::size_t k = 0; k < cos_.size(); ++k) {
    out[static_cast<Eigen::Index>(1 + 2 * k)] = cos_[k];
    out[static_cast<Eigen::Index>(2 + 2 * k)] = sin_[k];
  }
  return out;
}

StarSource StarSource::circle(double radius, std::size_t harmonics) {
  return StarSource(radius, std::vector<double>(harmonics, 0.0),
                    std::vector<double>(harmonics, 0.0));
}

double StarSource::radius(double theta) const {
  double r = a0_;
  for (std::size_t k = 0; k < cos_.size(); ++k) {
    const double arg = static_cast<double>(k + 1) * theta;
    r += cos_[k] * std::cos(arg) + sin_[k] * std::sin(arg);
  }
  return r;
}

bool StarSource::is_valid() const {
  // |r'| <= L, so between samples h apart r stays within L h / 2 of the
  // nearer sample. Refine until the bound decides.
  double lipschitz = 0.0;
  for (std::size_t k = 0; k < cos_.size(); ++k) {
    lipschitz += static_cast<double>(k + 1) * (std::fabs(cos_[k]) + std::fabs(sin_[k]));
  }
  for (std::size_t n = kCheckPoints; n <= 64 * kCheckPoints; n *= 4) {
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = radius(2.0 * std::numbers::pi * static_cast<double>(i) / n);
      if (!(r > 0.0 && r < 1.0)) return false;
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    const double margin = lipschitz * std::numbers::pi / static_cast<double>(n);
    if (lo - margin > 0.0 && hi + margin < 1.0) return true;
  }
  return false;
}

SpectralSource project_star(const StarSource& shape, const EigenBasis& basis,
                            std::size_t n_modes) {
  return project_star(shape, basis, n_modes, StarProjectionRule{});
}

SpectralSource project_star(const StarSource& shape, const EigenBasis& basis,
                            std::size_t n_modes, const StarProjectionRule& rule) {
  if (!shape.is_valid()) {
    throw InvalidArgument("project_star: radius function leaves (0, 1)");
  }
  const std::size_t n = (n_modes == 0) ? basis.size() : std::min(n_modes, basis.size());
  const auto angular = periodic_trapezoid(rule.angular_points);
  const auto radial = gauss_legendre(rule.radial_points, 0.0, 1.0);

  std::vector<double> radius(angular.size());
  for (std::size_t t = 0; t < angular.size(); ++t) {
    radius[t] = shape.radius(angular.nodes[t]);
    if (!(radius[t] > 0.0 && radius[t] < 1.0)) {
      throw InvalidArgument("project_star: radius function leaves (0, 1) at a quadrature node");
    }
  }

  SpectralSource out{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))};
  // int_0^{R} J_m(a rho) rho drho per angular node; the Cos/Sin partners of
  // a pair share it.
  std::vector<double> inner(angular.size());
  for (std::size_t idx = 0; idx < n; ++idx) {
    const auto& pair = basis[idx];
    const bool reuse = idx > 0 && basis[idx - 1].m == pair.m && basis[idx - 1].k == pair.k;
    if (!reuse) {
      const double a = pair.sqrt_lambda();
      for (std::size_t t = 0; t < angular.size(); ++t) {
        const double big_r = radius[t];
        double sum = 0.0;
        for (std::size_t i = 0; i < radial.size(); ++i) {
          const double rho = big_r * radial.nodes[i];
          sum += radial.weights[i] * bessel::j(pair.m, a * rho) * rho;
        }
        inner[t] = sum * big_r;
      }
    }
    double total = 0.0;
    for (std::size_t t = 0; t < angular.size(); ++t) {
      const double arg = pair.m * angular.nodes[t];
      const double trig = pair.phase == Phase::Cos ? std::cos(arg) : std::sin(arg);
      total += angular.weights[t] * trig * inner[t];
    }
    out.coeffs[static_cast<Eigen::Index>(idx)] = pair.omega * total;
  }
  return out;
}

SpectralSource project_constant(const EigenBasis& basis, std::size_t n_modes) {
  const std::size_t n = std::min(n_modes, basis.size());
  SpectralSource out{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))};
  for (std::size_t idx = 0; idx < n; ++idx) {
    const auto& pair = basis[idx];
    if (pair.m != 0) continue;
    // omega * 2 pi * int_0^1 J_0(a rho) rho drho = omega * 2 pi * J_1(a) / a.
    const double a = pair.sqrt_lambda();
    out.coeffs[static_cast<Eigen::Index>(idx)] =
        pair.omega * 2.0 * std::numbers::pi * bessel::j(1, a) / a;
  }
  return out;
}

}  // namespace heatinv
