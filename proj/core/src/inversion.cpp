#include "heatinv/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "heatinv/error.hpp"

namespace heatinv {
namespace {

double metric_weight(const TimeGrid& grid, bool time_weighted) {
  return time_weighted ? std::sqrt(grid.step()) : 1.0;
}

TVOptions tv_options(double beta, double eps, int max_inner, double tol) {
  TVOptions opts;
  opts.beta = beta;
  opts.epsilon = eps;
  opts.max_inner = max_inner;
  opts.tol = tol;
  return opts;
}

// Largest-magnitude coefficient positive.
void fix_sign(SpectralSource& p, Eigen::VectorXd& q) {
  Eigen::Index arg = 0;
  p.coeffs.cwiseAbs().maxCoeff(&arg);
  if (p.coeffs[arg] < 0.0) {
    p.coeffs = -p.coeffs;
    q = -q;
  }
}

Eigen::MatrixXd p_operator_from_cells(const Eigen::VectorXd& q_cells, const FluxDataset& data,
                                      const EigenBasis& basis, std::size_t modes) {
  return assemble_p_operator(StepSource::from_cells(q_cells, data.grid.step()), data.angles,
                             data.grid, basis, modes);
}

}  // namespace

void AlternatingConfig::validate() const {
  if (iterations < 1) throw InvalidArgument("AlternatingConfig: iterations must be >= 1");
  if (!(beta_p >= 0.0)) throw InvalidArgument("AlternatingConfig: beta_p must be >= 0");
  if (!(beta_q >= 0.0)) throw InvalidArgument("AlternatingConfig: beta_q must be >= 0");
  if (!(tv_epsilon > 0.0)) throw InvalidArgument("AlternatingConfig: tv_epsilon must be > 0");
  if (tv_max_inner < 1) throw InvalidArgument("AlternatingConfig: tv_max_inner must be >= 1");
}

std::vector<double> ReconstructionResult::objective_trace() const {
  std::vector<double> out;
  out.reserve(iterates.size());
  for (const auto& it : iterates) out.push_back(it.objective);
  return out;
}

ReconstructionResult alternate(const FluxDataset& data, const AlternatingConfig& cfg,
                               const EigenBasis& basis, const Truth* truth) {
  data.validate();
  cfg.validate();
  std::size_t modes = cfg.modes;
  if (modes == 0) modes = default_truncation(data.grid.step(), data.noise_level, basis);
  if (modes == 0 || modes > basis.size()) {
    std::ostringstream msg;
    msg << "alternate: N = " << modes << " is outside the basis (size " << basis.size()
        << ")";
    throw InvalidArgument(msg.str());
  }

  const double w = metric_weight(data.grid, cfg.time_weighted);
  const Eigen::VectorXd g = w * data.stacked();
  const TVOptions tv = tv_options(cfg.beta_q, cfg.tv_epsilon, cfg.tv_max_inner, cfg.tv_tol);

  ReconstructionResult result;
  result.grid = data.grid;
  result.modes = modes;

  auto solve_q = [&](const SpectralSource& p) {
    const Eigen::MatrixXd A = w * assemble_q_operator(p, data.angles, data.grid, basis);
    auto sol = tv_solve(A, g, tv);
    if (!sol.converged) ++result.tv_unconverged;
    return sol.x;
  };
  auto solve_p = [&](const Eigen::VectorXd& q) {
    const Eigen::MatrixXd M = w * p_operator_from_cells(q, data, basis, modes);
    return SpectralSource{tikhonov_solve(M, g, cfg.beta_p)};
  };
  auto record = [&](const SpectralSource& p, const Eigen::VectorXd& q) {
    Iterate it{p, q, 0.0, 0.0};
    const Eigen::MatrixXd A = w * assemble_q_operator(p, data.angles, data.grid, basis);
    it.misfit = (A * q - g).squaredNorm();
    it.objective = it.misfit + cfg.beta_p * p.coeffs.squaredNorm() +
                   cfg.beta_q * total_variation(q);
    result.iterates.push_back(it);
    if (truth) result.errors.push_back(error_report(p, q, truth->p, truth->q, data.grid));
  };

  SpectralSource p = project_constant(basis, modes);
  Eigen::VectorXd q = solve_q(p);
  record(p, q);

  for (int j = 0; j < cfg.iterations; ++j) {
    SpectralSource p_next = solve_p(q);
    const double s = source_norm(p_next);
    if (!(s > 0.0) || !std::isfinite(s)) {
      std::ostringstream msg;
      msg << "alternate: p iterate vanished at outer step " << j + 1
          << " (||p|| = " << s << "); data carry no recoverable source";
      throw DataError(msg.str());
    }
    Eigen::VectorXd q_next =
        solve_q(cfg.update_rule == UpdateRule::Jacobi ? p : p_next);
    p_next.coeffs /= s;
    q_next *= s;
    fix_sign(p_next, q_next);
    p = std::move(p_next);
    q = std::move(q_next);
    record(p, q);
  }
  result.p = p;
  result.q = q;
  return result;
}

Eigen::VectorXd cells_to_nodes(const Eigen::VectorXd& cells) {
  const Eigen::Index n = cells.size();
  Eigen::VectorXd nodes(n + 1);
  if (n == 0) return Eigen::VectorXd::Zero(1);
  nodes.head(n) = cells;
  nodes[n] = cells[n - 1];
  return nodes;
}

ErrorPair error_report(const SpectralSource& p_rec, const Eigen::VectorXd& q_rec,
                       const SpectralSource& p_true, const StepSource& q_true,
                       const TimeGrid& grid) {
  if (q_rec.size() != static_cast<Eigen::Index>(grid.size())) {
    throw InvalidArgument("error_report: q_rec does not match the time grid");
  }
  const double scale = source_norm(p_true);
  if (!(scale > 0.0)) throw InvalidArgument("error_report: true p is zero");

  const Eigen::Index len = static_cast<Eigen::Index>(std::max(p_rec.size(), p_true.size()));
  Eigen::VectorXd rec = Eigen::VectorXd::Zero(len);
  Eigen::VectorXd ref = Eigen::VectorXd::Zero(len);
  rec.head(p_rec.coeffs.size()) = p_rec.coeffs;
  ref.head(p_true.coeffs.size()) = p_true.coeffs / scale;

  const double plus = (rec - ref).norm();
  const double minus = (-rec - ref).norm();
  const double sign = plus <= minus ? 1.0 : -1.0;

  const Eigen::VectorXd nodes = cells_to_nodes(q_rec);
  double integral = 0.0;
  const double dt = grid.step();
  for (Eigen::Index i = 0; i < nodes.size(); ++i) {
    const double t = grid.time(static_cast<std::size_t>(i));
    const double diff = nodes[i] / sign - scale * q_true.evaluate(t);
    const double weight = (i == 0 || i + 1 == nodes.size()) ? 0.5 * dt : dt;
    integral += weight * diff * diff;
  }
  return {std::min(plus, minus), std::sqrt(integral)};
}

ShapeFitResult shape_fit(const FluxDataset& data, const StarSource& init,
                         const std::optional<StepSource>& known_q, const EigenBasis& basis,
                         const ShapeFitConfig& cfg) {
  data.validate();
  if (!init.is_valid()) {
    throw InvalidArgument("shape_fit: initial radius function leaves (0, 1)");
  }
  const std::size_t modes = cfg.modes == 0 ? basis.size() : std::min(cfg.modes, basis.size());
  const double w = metric_weight(data.grid, cfg.time_weighted);
  const Eigen::VectorXd g = w * data.stacked();
  const TVOptions tv = tv_options(cfg.beta_q, cfg.tv_epsilon, cfg.tv_max_inner, cfg.tv_tol);

  auto project = [&](const StarSource& s) {
    return project_star(s, basis, modes, cfg.projection);
  };
  auto solve_q = [&](const StarSource& s) {
    const Eigen::MatrixXd A = w * assemble_q_operator(project(s), data.angles, data.grid, basis);
    return tv_solve(A, g, tv).x;
  };

  ShapeFitResult out;
  out.shape = init;
  out.q = known_q ? known_q->cell_averages(data.grid.step(), data.grid.size())
                  : solve_q(init);

  Eigen::MatrixXd M;
  auto rebuild_operator = [&]() {
    M = known_q ? Eigen::MatrixXd(w * assemble_p_operator(*known_q, data.angles, data.grid,
                                                          basis, modes))
                : Eigen::MatrixXd(w * p_operator_from_cells(out.q, data, basis, modes));
  };
  rebuild_operator();

  const ResidualFn residual = [&](const Eigen::VectorXd& params)
      -> std::optional<Eigen::VectorXd> {
    const StarSource s = StarSource::from_params(params);
    if (!s.is_valid()) return std::nullopt;
    try {
      return Eigen::VectorXd(M * project(s).coeffs - g);
    } catch (const InvalidArgument&) {
      return std::nullopt;
    }
  };

  const int rounds = known_q ? 1 : cfg.max_rounds;
  for (int round = 1; round <= rounds; ++round) {
    out.rounds = round;
    const Eigen::VectorXd before = out.shape.params();
    auto fit = lm_minimize(residual, before, cfg.lm);
    out.lm_reports.push_back(fit.report);
    out.shape = StarSource::from_params(fit.x);
    if (known_q) break;
    out.q = solve_q(out.shape);
    rebuild_operator();
    if ((fit.x - before).lpNorm<Eigen::Infinity>() < cfg.tol) break;
  }

  const auto r = residual(out.shape.params());
  out.residual_norm = r ? r->norm() : std::numeric_limits<double>::infinity();
  const double gnorm = g.norm();
  out.relative_residual = gnorm > 0.0 ? out.residual_norm / gnorm : out.residual_norm;
  return out;
}

}  // namespace heatinv
