#include "heatinv/eigensystem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "heatinv/bessel.hpp"
#include "heatinv/error.hpp"

namespace heatinv {
namespace {

const double kInvSqrtPi = 1.0 / std::sqrt(std::numbers::pi);

double angular(const Eigenpair& p, double theta) {
  return p.phase == Phase::Cos ? std::cos(p.m * theta) : std::sin(p.m * theta);
}

}  // namespace

double Eigenpair::sqrt_lambda() const { return std::sqrt(lambda); }

double normalization_constant(int m, double lambda) {
  const double root = std::sqrt(lambda);
  if (m == 0) return kInvSqrtPi / std::fabs(bessel::j(1, root));
  return std::numbers::sqrt2 * kInvSqrtPi / std::fabs(bessel::j(m + 1, root));
}

EigenBasis EigenBasis::enumerate(double lambda_max) {
  if (!std::isfinite(lambda_max)) {
    throw InvalidArgument("enumerate_basis: non-finite lambda_max");
  }
  const double x_max = lambda_max > 0.0 ? std::sqrt(lambda_max) : 0.0;

  EigenBasis basis;
  basis.lambda_max_ = lambda_max;
  // j_{m,1} increases with m, so the first order without a zero below the
  // cutoff ends the scan.
  for (int m = 0;; ++m) {
    const auto roots = bessel::zeros_below(m, x_max);
    if (roots.empty()) break;
    for (std::size_t i = 0; i < roots.size(); ++i) {
      Eigenpair p;
      p.lambda = roots[i] * roots[i];
      p.m = m;
      p.k = static_cast<int>(i) + 1;
      p.omega = normalization_constant(m, p.lambda);
      p.phase = Phase::Cos;
      basis.pairs_.push_back(p);
      if (m != 0) {
        p.phase = Phase::Sin;
        basis.pairs_.push_back(p);
      }
    }
  }
  if (basis.pairs_.empty()) {
    std::ostringstream msg;
    msg << "enumerate_basis: lambda_max = " << lambda_max
        << " is below the first eigenvalue j_{0,1}^2";
    throw InvalidArgument(msg.str());
  }
  std::sort(basis.pairs_.begin(), basis.pairs_.end(),
            [](const Eigenpair& a, const Eigenpair& b) {
              if (a.lambda != b.lambda) return a.lambda < b.lambda;
              if (a.m != b.m) return a.m < b.m;
              return a.phase == Phase::Cos && b.phase == Phase::Sin;
            });
  for (std::size_t i = 0; i < basis.pairs_.size(); ++i) {
    basis.pairs_[i].index = i + 1;
  }
  return basis;
}

EigenBasis EigenBasis::enumerate_at_least(std::size_t count) {
  double bound = 6.0;
  for (;;) {
    auto basis = enumerate(bound);
    if (basis.size() >= count) return basis;
    // Weyl: N(lambda) ~ lambda / 4.
    bound = std::max(2.0 * bound, 4.0 * static_cast<double>(count) + 50.0);
  }
}

std::span<const Eigenpair> EigenBasis::first(std::size_t n) const {
  return std::span<const Eigenpair>(pairs_).first(std::min(n, pairs_.size()));
}

double EigenBasis::min_cross_order_gap() const {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < pairs_.size(); ++i) {
    if (pairs_[i].m != pairs_[i - 1].m) {
      gap = std::min(gap, pairs_[i].lambda - pairs_[i - 1].lambda);
    }
  }
  return gap;
}

std::size_t EigenBasis::count_up_to(double bound) const {
  return static_cast<std::size_t>(
      std::upper_bound(pairs_.begin(), pairs_.end(), bound,
                       [](double b, const Eigenpair& p) { return b < p.lambda; }) -
      pairs_.begin());
}

EigenBasis enumerate_basis(double lambda_max) { return EigenBasis::enumerate(lambda_max); }

double eigenfunction_eval(const Eigenpair& p, double r, double theta) {
  if (!(r >= 0.0 && r <= 1.0)) {
    throw InvalidArgument("eigenfunction_eval: r must lie in [0, 1]");
  }
  return p.omega * bessel::j(p.m, p.sqrt_lambda() * r) * angular(p, theta);
}

double coeff_a(const Eigenpair& p, double theta_z) {
  // omega > 0, so the sign of J_{m+1}(j_{m,k}) = (-1)^{k+1} moves into a_n.
  const double sign = p.k % 2 == 1 ? 1.0 : -1.0;
  return sign * coeff_a_envelope(p) * (p.m == 0 ? 1.0 : angular(p, theta_z));
}

double coeff_a_envelope(const Eigenpair& p) {
  const double base = kInvSqrtPi / p.sqrt_lambda();
  return p.m == 0 ? base : std::numbers::sqrt2 * base;
}

double harmonic_xi_product(int j, double theta_z, double r, double theta) {
  if (j < 1) throw InvalidArgument("harmonic_xi_product: j must be >= 1");
  if (!(r >= 0.0 && r <= 1.0)) {
    throw InvalidArgument("harmonic_xi_product: r must lie in [0, 1]");
  }
  if (j == 1) return 1.0 / (2.0 * std::numbers::pi);
  const int l = j / 2;
  const double radial = std::pow(r, l);
  const double trig_z = (j % 2 == 0) ? std::sin(l * theta_z) : std::cos(l * theta_z);
  const double trig = (j % 2 == 0) ? std::sin(l * theta) : std::cos(l * theta);
  return trig_z * radial * trig / std::numbers::pi;
}

double tail_bound(const EigenBasis& basis, std::span<const double> weighted_coeffs,
                  double gamma, std::size_t cut) {
  if (cut > basis.size()) {
    throw InvalidArgument("tail_bound: cut index exceeds basis length");
  }
  if (weighted_coeffs.size() < basis.size()) {
    throw InvalidArgument("tail_bound: coefficient list shorter than basis");
  }
  double envelope = 0.0;
  double coeffs = 0.0;
  for (std::size_t n = cut; n < basis.size(); ++n) {
    const double a = coeff_a_envelope(basis[n]) * std::pow(basis[n].lambda, -gamma);
    envelope += a * a;
    coeffs += weighted_coeffs[n] * weighted_coeffs[n];
  }
  return std::sqrt(envelope) * std::sqrt(coeffs);
}

void write_basis_csv(std::ostream& out, const EigenBasis& basis) {
  const auto old_precision = out.precision(17);
  out << "n,lambda,m,k,phase,omega\n";
  for (const auto& p : basis) {
    out << p.index << ',' << p.lambda << ',' << p.m << ',' << p.k << ','
        << (p.phase == Phase::Cos ? "cos" : "sin") << ',' << p.omega << '\n';
  }
  out.precision(old_precision);
}

}  // namespace heatinv
