#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace heatinv {

/// min ||M x - g||^2 + beta ||x||^2 via a Cholesky factorization of the
/// normal equations (M^T M + beta I) x = M^T g.
///
/// Throws ConvergenceError when the normal matrix is not positive definite
/// (only possible for beta = 0 and rank-deficient M).
Eigen::VectorXd tikhonov_solve(const Eigen::MatrixXd& M, const Eigen::VectorXd& g,
                               double beta);

struct TVOptions {
  double beta = 0.0;
  double epsilon = 1e-8;  // smoothing in sqrt(d^2 + eps^2)
  int max_inner = 100;
  double tol = 1e-10;     // relative iterate change
};

struct TVResult {
  Eigen::VectorXd x;
  /// Smoothed objective ||Ax - g||^2 + beta sum sqrt((Dx)_j^2 + eps^2) after
  /// each reweighting; non-increasing.
  std::vector<double> objective;
  int iterations = 0;
  bool converged = false;
};

/// Discrete total variation sum_j |x_{j+1} - x_j| (forward differences, no wrap).
double total_variation(const Eigen::VectorXd& x);

/// min ||A x - g||^2 + beta TV(x) by lagged-diffusivity IRLS:
///   (A^T A + (beta / 2) D^T W D) x = A^T g,  W = diag(((Dx)^2 + eps^2)^{-1/2}).
/// Each solve minimizes a quadratic majorizer, so the smoothed objective never
/// increases. An increase above 1e-6 relative throws ConvergenceError; a
/// smaller one is solve rounding and ends the iteration with the previous x. Running out of inner
/// iterations is reported through `converged`, not thrown.
TVResult tv_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& g, const TVOptions& opts);

struct LMOptions {
  double mu0 = 1e-3;
  double mu_up = 10.0;
  double mu_down = 0.5;
  int max_iter = 200;
  double gtol = 1e-10;  // on ||J^T r||_inf
};

struct LMReport {
  int iterations = 0;
  int residual_evaluations = 0;
  bool converged = false;
  double initial_norm = 0.0;
  double final_norm = 0.0;
  std::string stop_reason;
};

struct LMResult {
  Eigen::VectorXd x;
  LMReport report;
};

/// Residual callback; std::nullopt marks an infeasible point, which the
/// driver treats as a rejected step.
using ResidualFn = std::function<std::optional<Eigen::VectorXd>(const Eigen::VectorXd&)>;

/// Forward-difference Jacobian with h_i = max(1e-6, 1e-6 |x_i|). Falls back
/// to a backward difference when the forward point is infeasible.
Eigen::MatrixXd finite_difference_jacobian(const ResidualFn& residual, const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& r0, int* evaluations = nullptr);

/// Damped Gauss-Newton: (J^T J + mu I) delta = -J^T r; accepted steps scale
/// mu by mu_down, rejected ones by mu_up. Never returns a point with a larger
/// residual than x0. Throws ConvergenceError on a non-finite residual or
/// an infeasible x0.
LMResult lm_minimize(const ResidualFn& residual, const Eigen::VectorXd& x0,
                     const LMOptions& opts = {});

}  // namespace heatinv
