#include "heatinv/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "heatinv/error.hpp"

namespace heatinv {
namespace {

Eigen::VectorXd solve_spd(const Eigen::MatrixXd& normal, const Eigen::VectorXd& rhs,
                          const char* who) {
  Eigen::LLT<Eigen::MatrixXd> llt(normal);
  if (llt.info() != Eigen::Success) {
    throw ConvergenceError(std::string(who) + ": normal matrix is not positive definite");
  }
  Eigen::VectorXd x = llt.solve(rhs);
  // One step of iterative refinement.
  const Eigen::VectorXd residual = rhs - normal * x;
  x += llt.solve(residual);
  if (!x.allFinite()) {
    throw ConvergenceError(std::string(who) + ": singular normal equations");
  }
  return x;
}

double smoothed_tv(const Eigen::VectorXd& x, double eps) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j + 1 < x.size(); ++j) {
    const double d = x[j + 1] - x[j];
    sum += std::sqrt(d * d + eps * eps);
  }
  return sum;
}

void check_finite(const Eigen::VectorXd& r, const Eigen::VectorXd& x) {
  if (r.allFinite()) return;
  std::ostringstream msg;
  msg << "lm_minimize: non-finite residual at x = [" << x.transpose() << "]";
  throw ConvergenceError(msg.str());
}

}  // namespace

Eigen::VectorXd tikhonov_solve(const Eigen::MatrixXd& M, const Eigen::VectorXd& g,
                               double beta) {
  if (M.rows() != g.size()) {
    throw InvalidArgument("tikhonov_solve: operator rows do not match data length");
  }
  if (!(beta >= 0.0)) throw InvalidArgument("tikhonov_solve: beta must be >= 0");
  Eigen::MatrixXd normal = M.transpose() * M;
  normal.diagonal().array() += beta;
  return solve_spd(normal, M.transpose() * g, "tikhonov_solve");
}

double total_variation(const Eigen::VectorXd& x) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j + 1 < x.size(); ++j) sum += std::fabs(x[j + 1] - x[j]);
  return sum;
}

TVResult tv_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& g, const TVOptions& opts) {
  if (A.rows() != g.size()) {
    throw InvalidArgument("tv_solve: operator rows do not match data length");
  }
  if (!(opts.beta >= 0.0)) throw InvalidArgument("tv_solve: beta must be >= 0");
  if (!(opts.epsilon > 0.0)) throw InvalidArgument("tv_solve: epsilon must be > 0");
  if (!(opts.tol > 0.0)) throw InvalidArgument("tv_solve: tol must be > 0");
  if (opts.max_inner < 1) throw InvalidArgument("tv_solve: max_inner must be >= 1");

  const Eigen::Index n = A.cols();
  const Eigen::MatrixXd gram = A.transpose() * A;
  const Eigen::VectorXd rhs = A.transpose() * g;
  auto objective = [&](const Eigen::VectorXd& x) {
    return (A * x - g).squaredNorm() + opts.beta * smoothed_tv(x, opts.epsilon);
  };

  TVResult result;
  // First pass: quadratic-gradient solve with a constant weight 1 / tau,
  // tau ~ |g| / |A| the scale of x. Scaling g, beta and eps by C then scales
  // every iterate by C.
  const double a_norm = A.norm();
  const double tau = a_norm > 0.0 ? std::max(g.norm() / a_norm, opts.epsilon) : 1.0;
  Eigen::VectorXd weights = Eigen::VectorXd::Constant(std::max<Eigen::Index>(n - 1, 0), 1.0 / tau);
  if (opts.beta == 0.0) {
    result.x = solve_spd(gram, rhs, "tv_solve");
    result.objective.push_back(objective(result.x));
    result.iterations = 1;
    result.converged = true;
    return result;
  }

  auto weighted_solve = [&](const Eigen::VectorXd& w) {
    Eigen::MatrixXd normal = gram;
    const double half_beta = 0.5 * opts.beta;
    for (Eigen::Index j = 0; j + 1 < n; ++j) {
      const double c = half_beta * w[j];
      normal(j, j) += c;
      normal(j + 1, j + 1) += c;
      normal(j, j + 1) -= c;
      normal(j + 1, j) -= c;
    }
    return solve_spd(normal, rhs, "tv_solve");
  };

  Eigen::VectorXd x = weighted_solve(weights);
  double current = objective(x);
  result.objective.push_back(current);
  for (int it = 1; it <= opts.max_inner; ++it) {
    for (Eigen::Index j = 0; j + 1 < n; ++j) {
      const double d = x[j + 1] - x[j];
      weights[j] = 1.0 / std::sqrt(d * d + opts.epsilon * opts.epsilon);
    }
    Eigen::VectorXd next = weighted_solve(weights);
    const double value = objective(next);
    const double change = (next - x).norm() / std::max(next.norm(), 1e-300);
    if (value > current * (1.0 + 1e-10) + 1e-300) {
      // Increases this small come from solving the badly scaled system once
      // the weights reach 1/eps; keep the better x and stop.
      if (value <= current * (1.0 + 1e-6)) {
        result.x = std::move(x);
        result.iterations = it;
        result.converged = true;
        return result;
      }
      std::ostringstream msg;
      msg.precision(17);
      msg << "tv_solve: objective increased from " << current << " to " << value
          << " at inner iteration " << it;
      throw ConvergenceError(msg.str());
    }
    x = std::move(next);
    current = value;
    result.objective.push_back(current);
    result.iterations = it;
    if (change < opts.tol) {
      result.converged = true;
      break;
    }
  }
  result.x = std::move(x);
  return result;
}

Eigen::MatrixXd finite_difference_jacobian(const ResidualFn& residual, const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& r0, int* evaluations) {
  Eigen::MatrixXd jac(r0.size(), x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = std::max(1e-6, 1e-6 * std::fabs(x[i]));
    probe[i] = x[i] + h;
    auto r = residual(probe);
    if (evaluations) ++*evaluations;
    double signed_h = h;
    if (!r) {
      probe[i] = x[i] - h;
      r = residual(probe);
      if (evaluations) ++*evaluations;
      signed_h = -h;
      if (!r) {
        throw ConvergenceError("finite_difference_jacobian: both probes infeasible");
      }
    }
    check_finite(*r, probe);
    jac.col(i) = (*r - r0) / signed_h;
    probe[i] = x[i];
  }
  return jac;
}

LMResult lm_minimize(const ResidualFn& residual, const Eigen::VectorXd& x0,
                     const LMOptions& opts) {
  LMResult out;
  auto& report = out.report;
  auto r0 = residual(x0);
  report.residual_evaluations = 1;
  if (!r0) throw ConvergenceError("lm_minimize: initial point is infeasible");
  check_finite(*r0, x0);

  Eigen::VectorXd x = x0;
  Eigen::VectorXd r = *r0;
  double cost = r.squaredNorm();
  report.initial_norm = std::sqrt(cost);
  double mu = opts.mu0;

  if (cost == 0.0) {
    out.x = x;
    report.converged = true;
    report.final_norm = 0.0;
    report.stop_reason = "zero residual";
    return out;
  }

  Eigen::MatrixXd jac = finite_difference_jacobian(residual, x, r, &report.residual_evaluations);
  Eigen::VectorXd grad = jac.transpose() * r;
  report.stop_reason = "max_iter";
  for (int it = 1; it <= opts.max_iter; ++it) {
    report.iterations = it;
    if (grad.lpNorm<Eigen::Infinity>() < opts.gtol) {
      report.converged = true;
      report.stop_reason = "gradient";
      break;
    }
    Eigen::MatrixXd normal = jac.transpose() * jac;
    normal.diagonal().array() += mu;
    const Eigen::VectorXd step = normal.llt().solve(-grad);
    if (step.norm() <= 1e-15 * (x.norm() + 1e-15)) {
      report.converged = true;
      report.stop_reason = "step";
      break;
    }
    const Eigen::VectorXd trial = x + step;
    auto r_trial = residual(trial);
    ++report.residual_evaluations;
    if (r_trial) check_finite(*r_trial, trial);
    if (r_trial && r_trial->squaredNorm() < cost) {
      x = trial;
      r = std::move(*r_trial);
      cost = r.squaredNorm();
      mu *= opts.mu_down;
      if (cost == 0.0) {
        report.converged = true;
        report.stop_reason = "zero residual";
        break;
      }
      jac = finite_difference_jacobian(residual, x, r, &report.residual_evaluations);
      grad = jac.transpose() * r;
    } else {
      mu *= opts.mu_up;
      if (mu > 1e16) {
        report.stop_reason = "damping overflow";
        break;
      }
    }
  }
  out.x = x;
  report.final_norm = std::sqrt(cost);
  return out;
}

}  // namespace heatinv
