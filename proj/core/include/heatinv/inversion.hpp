#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "heatinv/eigensystem.hpp"
#include "heatinv/forward.hpp"
#include "heatinv/solvers.hpp"
#include "heatinv/sources.hpp"

namespace heatinv {

/// Which p iterate feeds the q-step of outer iteration j.
enum class UpdateRule {
  Jacobi,       // q_{j+1} from F[p_j]
  GaussSeidel,   // q_{j+1} from F[p_{j+1}]
};

struct AlternatingConfig {
  std::size_t modes = 0;  // N; 0 picks default_truncation(dt, delta)
  double beta_p = 1e-2;
  double beta_q = 8e-4;
  int iterations = 10;
  UpdateRule update_rule = UpdateRule::Jacobi;
  double tv_epsilon = 1e-8;
  int tv_max_inner = 100;
  double tv_tol = 1e-10;
  /// Measure the data misfit in L2[0, T] (rows scaled by sqrt(dt)) rather
  /// than as a plain sum over samples.
  bool time_weighted = true;

  void validate() const;
};

struct ErrorPair {
  double e_p = 0.0;
  double e_q = 0.0;
};

struct Iterate {
  SpectralSource p;   // unit norm, sign fixed
  Eigen::VectorXd q;  // cell values on the time grid
  double misfit = 0.0;     // ||F(p, q) - g||^2 in the configured metric
  double objective = 0.0;  // misfit + beta_p ||p||^2 + beta_q TV(q)
};

struct ReconstructionResult {
  SpectralSource p;
  Eigen::VectorXd q;
  TimeGrid grid;
  std::size_t modes = 0;
  std::vector<Iterate> iterates;  // iterates[0] is the initial guess
  std::vector<ErrorPair> errors;  // per iterate, when a truth was supplied
  int tv_unconverged = 0;         // q-solves that hit max_inner

  std::vector<double> objective_trace() const;
};

struct Truth {
  SpectralSource p;
  StepSource q;
};

/// Alternating Tikhonov (p) / total-variation (q) reconstruction.
///
/// p_0 is the constant 1 projected onto S_N and q_0 the TV solution for
/// F[p_0]. Each outer step solves the p-problem with F[q_j], the q-problem
/// with F[p_j] or F[p_{j+1}] (see UpdateRule), then rescales p <- p / s,
/// q <- s q with s = ||p|| and flips both so the largest |p_n| is positive.
///
/// Throws DataError when a p iterate vanishes (e.g. all-zero data).
ReconstructionResult alternate(const FluxDataset& data, const AlternatingConfig& cfg,
                               const EigenBasis& basis, const Truth* truth = nullptr);

/// Errors against the truth modulo the sign ambiguity:
///   e_p = min_s ||s p_rec - p_true / ||p_true|| ||,
///   e_q = ||q_rec / s - ||p_true|| q_true||_{L2[0,T]}  (trapezoid on grid nodes).
ErrorPair error_report(const SpectralSource& p_rec, const Eigen::VectorXd& q_rec,
                       const SpectralSource& p_true, const StepSource& q_true,
                       const TimeGrid& grid);

/// Node values t_0..t_n of a cell vector (cell j covers [t_j, t_{j+1})).
Eigen::VectorXd cells_to_nodes(const Eigen::VectorXd& cells);

struct ShapeFitConfig {
  std::size_t modes = 0;  // N; 0 uses the whole basis
  LMOptions lm;
  int max_rounds = 20;
  double tol = 1e-6;      // max |parameter change| between rounds
  double beta_q = 8e-4;
  double tv_epsilon = 1e-8;
  int tv_max_inner = 100;
  double tv_tol = 1e-10;
  bool time_weighted = true;
  StarProjectionRule projection;
};

struct ShapeFitResult {
  StarSource shape;
  Eigen::VectorXd q;  // cell values
  int rounds = 0;
  std::vector<LMReport> lm_reports;
  double residual_norm = 0.0;      // final ||F(p, q) - g|| in the configured metric
  double relative_residual = 0.0;  // residual_norm / ||g||
};

/// Levenberg-Marquardt recovery of a star-shaped indicator source. With a
/// known q a single LM solve is run; otherwise LM on the shape and a TV solve
/// for q alternate until the shape parameters move less than cfg.tol or
/// cfg.max_rounds is reached. Shapes leaving 0 < r < 1 are rejected steps.
ShapeFitResult shape_fit(const FluxDataset& data, const StarSource& init,
                         const std::optional<StepSource>& known_q, const EigenBasis& basis,
                         const ShapeFitConfig& cfg);

}  // namespace heatinv
