// Prints one PASS/FAIL line per acceptance criterion. Exit status is 0 iff
// the set of failing criteria equals the one given by --expect-fail (empty
// by default), so known failures stay visible without hiding regressions.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>

#include "heatinv/angles.hpp"
#include "heatinv/bessel.hpp"
#include "heatinv/eigensystem.hpp"
#include "heatinv/error.hpp"
#include "heatinv/forward.hpp"
#include "heatinv/inversion.hpp"
#include "heatinv/quadrature.hpp"
#include "heatinv/solvers.hpp"
#include "heatinv/sources.hpp"
#include "oracles.hpp"

using namespace heatinv;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

const std::vector<double> kAngles{0.0, 13.0 * std::numbers::pi / 32.0};

StepSource e1_q() { return StepSource({{0.0, 1.0}, {1.0 / 3.0, 1.0}, {2.0 / 3.0, -0.5}}); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// 1. Bessel zeros against bisection on a multiprecision series.
void bessel_zeros(Outcome& o, double& timed) {
  struct Case { int m, k; double frozen; };
  // Frozen from oracle::bessel_zero.
  const Case cases[] = {{0, 1, 2.404825557695773},
                        {1, 1, 3.8317059702075125},
                        {0, 2, 5.520078110286311},
                        {2, 1, 5.135622301840683}};
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> got;
  for (const auto& c : cases) got.push_back(bessel::zero(c.m, c.k));
  timed = seconds_since(t0);
  double worst = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    const auto& c = cases[i];
    const double live = oracle::bessel_zero(c.m, c.k);
    o.check(std::fabs(live - c.frozen) < 1e-12, "frozen oracle drift");
    worst = std::max(worst, std::fabs(got[i] - c.frozen));
  }
  o.check(worst <= 1e-10, "zero accuracy");
  o.check(timed < 1.0, "runtime");
  o.detail << "max |j - oracle| = " << worst;
}

// 2. Orthonormality, omega closed form, and the harmonic inner products.
void eigensystem(Outcome& o) {
  const auto b = EigenBasis::enumerate_at_least(30);
  const auto rule = default_disc_rule();
  double ortho = 0.0;
  for (std::size_t i = 0; i < 30; ++i) {
    for (std::size_t j = i; j < 30; ++j) {
      const double ip = rule.integrate([&](double r, double t) {
        return eigenfunction_eval(b[i], r, t) * eigenfunction_eval(b[j], r, t);
      });
      ortho = std::max(ortho, std::fabs(ip - (i == j ? 1.0 : 0.0)));
    }
  }
  double omega = 0.0;
  for (std::size_t n = 0; n < 30; ++n) {
    const auto& p = b[n];
    const double a = p.sqrt_lambda();
    const double radial = oracle::simpson(
        [&](double r) {
          const double v = boost::math::cyl_bessel_j(p.m, a * r);
          return v * v * r;
        },
        0.0, 1.0, 2000);
    const double angular = p.m == 0 ? 2.0 * std::numbers::pi : std::numbers::pi;
    omega = std::max(omega, std::fabs(p.omega - 1.0 / std::sqrt(radial * angular)));
  }
  double harmonic = 0.0;
  for (double z : kAngles) {
    for (std::size_t n = 0; n < 20; ++n) {
      const auto& p = b[n];
      for (int j = 1; j <= 12; ++j) {
        const double ip = rule.integrate([&](double r, double t) {
          return harmonic_xi_product(j, z, r, t) * eigenfunction_eval(p, r, t);
        });
        const Phase want = (j % 2 == 1) ? Phase::Cos : Phase::Sin;
        const bool match = p.m == j / 2 && (p.m == 0 || p.phase == want);
        harmonic = std::max(harmonic, std::fabs(ip - (match ? coeff_a(p, z) : 0.0)));
      }
    }
  }
  o.check(ortho <= 1e-7, "orthonormality");
  o.check(omega <= 1e-7, "omega");
  o.check(harmonic <= 1e-8, "harmonic inner products");
  o.detail << "orthonormality " << ortho << ", omega " << omega << ", <xi xi, phi> - a_n "
           << harmonic;
}

// 3. Closed-form flux against both assembled operators; scaling invariance.
void forward_consistency(Outcome& o) {
  const auto basis = enumerate_basis(400.0);
  const TimeGrid grid(1.0, 0.01);
  std::mt19937_64 gen(3);
  std::normal_distribution<double> d;
  SpectralSource p{Eigen::VectorXd(60)};
  for (Eigen::Index i = 0; i < 60; ++i) p.coeffs[i] = d(gen) / (1.0 + i);
  const StepSource q({{0.0, 1.0}, {0.33, 1.0}, {0.67, -0.5}});  // grid-aligned e1 profile

  const Eigen::VectorXd via_p = assemble_p_operator(q, kAngles, grid, basis, 60) * p.coeffs;
  const Eigen::VectorXd via_q =
      assemble_q_operator(p, kAngles, grid, basis) * q.cell_averages(grid.step(), grid.size());
  double op = 0.0;
  for (std::size_t l = 0; l < kAngles.size(); ++l) {
    for (std::size_t i = 1; i <= grid.size(); ++i) {
      const auto row = static_cast<Eigen::Index>(l * grid.size() + i - 1);
      const double exact = flux_exact(p, q, kAngles[l], grid.time(i), basis);
      op = std::max({op, std::fabs(via_p[row] - exact), std::fabs(via_q[row] - exact)});
    }
  }
  o.check(op <= 1e-12, "operator consistency");

  bool bitwise = true;
  double rel10 = 0.0;
  for (double c : {2.0, -0.5, 0.25, 10.0}) {
    const SpectralSource cp{c * p.coeffs};
    const auto qc = e1_q().scaled(1.0 / c);
    for (double t : {0.05, 0.4, 0.9}) {
      for (double th : kAngles) {
        const double lhs = flux_exact(cp, qc, th, t, basis);
        const double rhs = flux_exact(p, e1_q(), th, t, basis);
        if (c == 10.0) {
          rel10 = std::max(rel10, std::fabs(lhs - rhs) / std::fabs(rhs));
        } else {
          bitwise = bitwise && lhs == rhs;
        }
      }
    }
  }
  o.check(bitwise, "scaling exact for C = 2, -1/2, 1/4");
  o.check(rel10 <= 1e-14, "scaling for C = 10");
  o.detail << "max |F - F_exact| = " << op << ", F(Cp, q/C) == F(p, q) bitwise for C in "
           << "{2, -1/2, 1/4}: " << (bitwise ? "yes" : "no") << ", C = 10 rel. dev. " << rel10;
}

// 4. e1 at the reference parameters, median over 11 seeds.
void e1_reproduction(Outcome& o) {
  const auto basis = enumerate_basis(700.0);
  Eigen::VectorXd pv(3);
  pv << 5.0, 2.0, 1.0;
  const SpectralSource p{pv / std::sqrt(30.0)};
  const auto q = e1_q();
  const Truth truth{p, q};
  AlternatingConfig cfg;
  cfg.modes = 3;
  cfg.beta_p = 1e-2;
  cfg.beta_q = 8e-4;
  cfg.iterations = 10;
  std::vector<double> deltas{0.01, 0.03, 0.05};
  std::vector<std::vector<double>> ep(3), eq(3);
  double worst_seed = 0.0;
  for (std::uint64_t seed = 1; seed <= 11; ++seed) {
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t k = 0; k < deltas.size(); ++k) {
      const auto data = synthesize(p, q, kAngles, TimeGrid(1.0, 0.01), basis, deltas[k], seed);
      const auto res = alternate(data, cfg, basis, &truth);
      ep[k].push_back(res.errors.back().e_p);
      eq[k].push_back(res.errors.back().e_q);
    }
    worst_seed = std::max(worst_seed, seconds_since(t0));
  }
  const double ep1 = median(ep[0]), eq1 = median(eq[0]), ep5 = median(ep[2]);
  o.check(ep1 <= 2.7e-1, "e_p(1%) <= 0.27");
  o.check(eq1 <= 1.7e-1, "e_q(1%) <= 0.17");
  o.check(ep1 <= ep5, "e_p(1%) <= e_p(5%)");
  o.check(worst_seed < 120.0, "runtime per seed");
  o.detail << "median e_p/e_q: 1% " << ep1 << '/' << eq1 << ", 3% " << median(ep[1]) << '/'
           << median(eq[1]) << ", 5% " << ep5 << '/' << median(eq[2]) << "; slowest seed "
           << worst_seed << " s";
}

// 5. Single-mode noiseless recovery.
void identifiability(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto basis = enumerate_basis(400.0);
  const SpectralSource p{Eigen::VectorXd::Ones(1)};
  const StepSource q({{0.0, 1.0}});
  const auto data = synthesize(p, q, kAngles, TimeGrid(1.0, 0.01), basis, 0.0, 1);
  AlternatingConfig cfg;
  cfg.modes = 1;
  cfg.beta_p = 1e-8;
  cfg.beta_q = 1e-8;
  const Truth truth{p, q};
  const auto res = alternate(data, cfg, basis, &truth);
  const double elapsed = seconds_since(t0);
  o.check(res.errors.back().e_p < 1e-2, "e_p");
  o.check(res.errors.back().e_q < 1e-2, "e_q");
  o.check(elapsed < 10.0, "runtime");
  o.detail << "e_p " << res.errors.back().e_p << ", e_q " << res.errors.back().e_q;
}

// 6. Zero-free angle intervals.
void angle_gaps(Outcome& o, double& timed) {
  auto frac = [](const angles::Fraction& f) {
    return std::to_string(f.num) + "/" + std::to_string(f.den);
  };
  const auto t0 = std::chrono::steady_clock::now();
  const auto r29 = angles::gap_report(29);
  const auto r17p = angles::gap_report(17, {1, 4}, angles::Denominators::Prime);
  const auto r17a = angles::gap_report(17, {1, 4}, angles::Denominators::All);
  timed = seconds_since(t0);

  const bool below = r29.nearest_below && *r29.nearest_below == angles::Fraction{4, 17};
  const double len = r29.gap_below.length_pi();
  o.check(below, "nearest below 1/4 is 4/17");
  o.check(std::fabs(len - 0.015) <= 5e-4, "gap length 0.015 pi");
  const angles::Fraction want{4, 13};
  const bool endpoints = r17p.gap_above.left == angles::Fraction{1, 4} &&
                         (r17p.gap_above.right == want || r17a.gap_above.right == want);
  o.check(endpoints, "b_max = 17 interval (pi/4, 4 pi/13)");
  o.check(timed < 1.0, "runtime");
  o.detail << "b_max 29: (" << frac(r29.gap_below.left) << ", 1/4), length " << len
           << " pi; b_max 17: (1/4, " << frac(r17p.gap_above.right) << ") prime, (1/4, "
           << frac(r17a.gap_above.right) << ") all denominators";
}

// 7. Star-shape recovery, noiseless, q known.
void shape_recovery(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto basis = enumerate_basis(300.0);
  const StarSource truth(0.5, {0.0, 0.2, 0.0, 0.0}, {0.0, 0.0, 0.0, 0.0});
  const auto q = e1_q();
  const auto data =
      synthesize(project_star(truth, basis), q, kAngles, TimeGrid(1.0, 0.01), basis, 0.0, 1);
  const auto res = shape_fit(data, StarSource::circle(0.5, 4), q, basis, {});
  const double elapsed = seconds_since(t0);
  const double a0 = res.shape.a0(), c2 = res.shape.cos_coeffs()[1];
  o.check(std::fabs(c2 - 0.2) <= 0.05 * 0.2, "cos 2theta coefficient");
  o.check(std::fabs(a0 - 0.5) <= 0.05 * 0.5, "constant term");
  o.check(elapsed < 300.0, "runtime");
  const auto alt = shape_fit(data, StarSource::circle(0.4, 4), q, basis, {});
  o.detail << "init r = 0.5: a0 " << a0 << ", c2 " << c2 << " (" << elapsed
           << " s); init r = 0.4: a0 " << alt.shape.a0() << ", c2 "
           << alt.shape.cos_coeffs()[1];
}

// 8. Solver suite.
void solver_suite(Outcome& o) {
  Eigen::Matrix2d m;
  m << 1, 0, 0, 2;
  const auto x = tikhonov_solve(m, Eigen::Vector2d(1, 2), 1.0);
  const double tik = std::max(std::fabs(x[0] - 0.5), std::fabs(x[1] - 0.8));
  o.check(tik <= 1e-12, "Tikhonov 2x2");

  std::mt19937_64 gen(12);
  std::normal_distribution<double> d;
  int runs = 0;
  bool monotone = true;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd a(40, 30);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = d(gen);
    Eigen::VectorXd g(40);
    for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = d(gen);
    try {
      const auto res = tv_solve(a, g, {.beta = 0.1 * (trial + 1)});
      for (std::size_t k = 1; k < res.objective.size(); ++k) {
        monotone = monotone && res.objective[k] <= res.objective[k - 1] * (1.0 + 1e-10);
      }
      ++runs;
    } catch (const ConvergenceError&) {
      monotone = false;
    }
  }
  o.check(monotone, "TV objective monotone");

  ResidualFn rosen = [](const Eigen::VectorXd& v) -> std::optional<Eigen::VectorXd> {
    return Eigen::Vector2d(1 - v[0], 10 * (v[1] - v[0] * v[0]));
  };
  const auto lm = lm_minimize(rosen, Eigen::Vector2d(-1.2, 1.0));
  const double lm_err = (lm.x - Eigen::Vector2d(1, 1)).cwiseAbs().maxCoeff();
  o.check(lm_err <= 1e-6, "LM Rosenbrock");
  o.detail << "Tikhonov err " << tik << ", TV monotone over " << runs << " runs, LM |x - (1,1)| "
           << lm_err;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> expected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--expect-fail" && i + 1 < argc) {
      std::istringstream list(argv[++i]);
      for (std::string item; std::getline(list, item, ',');) expected.insert(std::stoi(item));
    } else {
      std::cerr << "usage: acceptance [--expect-fail n[,m...]]\n";
      return 2;
    }
  }

  double timed1 = 0.0, timed6 = 0.0;
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"Bessel zeros", [&](Outcome& o) { bessel_zeros(o, timed1); }},
      {"eigensystem identities", eigensystem},
      {"forward self-consistency", forward_consistency},
      {"e1 reproduction", e1_reproduction},
      {"noiseless identifiability", identifiability},
      {"angle gaps", [&](Outcome& o) { angle_gaps(o, timed6); }},
      {"shape fit e2", shape_recovery},
      {"solver suite", solver_suite},
  };

  std::set<int> failed;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    Outcome o;
    o.detail.precision(4);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "[exception: " << e.what() << "]";
    }
    const double elapsed = seconds_since(t0);
    if (!o.pass) failed.insert(id);
    std::printf("criterion %d %-26s %s  %s (%.2f s)\n", id, criteria[i].first.c_str(),
                o.pass ? "PASS" : "FAIL", o.detail.str().c_str(), elapsed);
    std::fflush(stdout);
  }
  if (failed != expected) {
    std::printf("failing set differs from --expect-fail\n");
    return 1;
  }
  if (!failed.empty()) std::printf("only the expected criteria failed\n");
  return 0;
}
