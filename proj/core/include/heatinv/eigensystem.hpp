#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace heatinv {

/// Angular factor of a disc eigenfunction: cos(m theta) or sin(m theta).
enum class Phase { Cos, Sin };

/// One Dirichlet eigenpair of -Laplace on the unit disc:
///   phi(r, theta) = omega * J_m(sqrt(lambda) r) * {cos, sin}(m theta)
/// with lambda = j_{m,k}^2 and omega the L2 normalization.
struct Eigenpair {
  std::size_t index = 0;  // 1-based position in the sorted basis
  double lambda = 0.0;
  int m = 0;
  int k = 1;
  Phase phase = Phase::Cos;
  double omega = 0.0;

  double sqrt_lambda() const;
};

/// Complete list of eigenpairs with lambda <= lambda_max, sorted by lambda
/// (multiplicity counted), ties broken by m ascending then Cos before Sin.
/// Immutable after construction.
class EigenBasis {
 public:
  EigenBasis() = default;

  /// Throws InvalidArgument when lambda_max is below the first eigenvalue.
  static EigenBasis enumerate(double lambda_max);

  /// Smallest complete basis holding at least `count` pairs.
  static EigenBasis enumerate_at_least(std::size_t count);

  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  double lambda_max() const { return lambda_max_; }

  const Eigenpair& operator[](std::size_t i) const { return pairs_[i]; }
  auto begin() const { return pairs_.begin(); }
  auto end() const { return pairs_.end(); }

  std::span<const Eigenpair> pairs() const { return pairs_; }
  /// First n pairs; n is clamped to size().
  std::span<const Eigenpair> first(std::size_t n) const;

  /// Smallest gap between eigenvalues of different angular order. Bourget's
  /// hypothesis says these never coincide; values below 1e-9 indicate a
  /// numerical problem.
  double min_cross_order_gap() const;

  /// Number of pairs with lambda <= bound.
  std::size_t count_up_to(double bound) const;

 private:
  std::vector<Eigenpair> pairs_;
  double lambda_max_ = 0.0;
};

/// Convenience wrapper for EigenBasis::enumerate.
EigenBasis enumerate_basis(double lambda_max);

/// omega_n from the closed form: sqrt(2/pi) / |J_{m+1}(sqrt(lambda))| for
/// m != 0 and pi^{-1/2} / |J_1(sqrt(lambda))| for m = 0.
double normalization_constant(int m, double lambda);

/// phi_n(r, theta) for r in [0, 1].
double eigenfunction_eval(const Eigenpair& p, double r, double theta);

/// Boundary coupling a_n(z) at z = (cos theta_z, sin theta_z), i.e.
/// -lambda_n^{-1} d phi_n / d nu at z. Equals <xi_j(z) xi_j, phi_n> for the
/// matching harmonic; carries the sign (-1)^{k+1} because omega_n > 0.
double coeff_a(const Eigenpair& p, double theta_z);

/// max over theta_z of |a_n(theta_z)|.
double coeff_a_envelope(const Eigenpair& p);

/// xi_j(1, theta_z) * xi_j(r, theta) for the harmonic basis
///   xi_1 = (2 pi)^{-1/2}, xi_{2l} = pi^{-1/2} r^l sin(l theta),
///   xi_{2l+1} = pi^{-1/2} r^l cos(l theta).
double harmonic_xi_product(int j, double theta_z, double r, double theta);

/// Cauchy-Schwarz bound on |sum_{n > cut} a_n(z) p_n| valid for every z:
///   (sum_{n>cut} env_n^2 lambda_n^{-2 gamma})^{1/2}
///     * (sum_{n>cut} (lambda_n^gamma p_n)^2)^{1/2}.
/// `weighted_coeffs[n]` holds lambda_n^gamma p_n for the n-th pair (0-based)
/// and must cover the whole basis.
double tail_bound(const EigenBasis& basis, std::span<const double> weighted_coeffs,
                  double gamma, std::size_t cut);

/// Writes "n,lambda,m,k,phase,omega" rows with 17 significant digits.
void write_basis_csv(std::ostream& out, const EigenBasis& basis);

}  // namespace heatinv
