#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/special_functions/bessel.hpp>
#include <gtest/gtest.h>

#include "heatinv/error.hpp"
#include "heatinv/sources.hpp"
#include "oracles.hpp"

using namespace heatinv;

namespace {

StepSource e1_q() { return StepSource({{0.0, 1.0}, {1.0 / 3.0, 1.0}, {2.0 / 3.0, -0.5}}); }

// Independent projection: Simpson in rho up to r(theta), midpoint in theta,
// boost's Bessel J.
double reference_coeff(const Eigenpair& p, const std::function<double(double)>& radius,
                       int n_theta, int n_rho) {
  const double a = p.sqrt_lambda();
  const double dt = 2.0 * std::numbers::pi / n_theta;
  double total = 0.0;
  for (int k = 0; k < n_theta; ++k) {
    const double theta = (k + 0.5) * dt;
    const double inner = oracle::simpson(
        [&](double rho) { return boost::math::cyl_bessel_j(p.m, a * rho) * rho; }, 0.0,
        radius(theta), n_rho);
    const double trig = p.phase == Phase::Cos ? std::cos(p.m * theta) : std::sin(p.m * theta);
    total += trig * inner;
  }
  return p.omega * total * dt;
}

}  // namespace

TEST(StepSource, EvaluatesE1Profile) {
  const auto q = e1_q();
  EXPECT_EQ(q(0.5), 2.0);
  EXPECT_EQ(q(1.0 / 3.0), 2.0);  // H(0) = 1
  EXPECT_EQ(q(0.0), 1.0);
  EXPECT_EQ(q(0.9), 1.5);
  EXPECT_EQ(q(1.0), 1.5);
  EXPECT_THROW(q(-0.1), InvalidArgument);

  const StepSource late({{0.25, 3.0}});
  EXPECT_EQ(late(0.1), 0.0);
  EXPECT_EQ(late(0.25), 3.0);
}

TEST(StepSource, LevelsMatchPiecewiseForm) {
  const auto q = e1_q();
  const auto beta = q.levels();
  ASSERT_EQ(beta.size(), 3u);
  EXPECT_EQ(beta[0], 1.0);
  EXPECT_EQ(beta[1], 2.0);
  EXPECT_EQ(beta[2], 1.5);
  EXPECT_EQ(q.sup_norm(), 2.0);
  EXPECT_NEAR(q.eta(), 1.0 / 3.0, 1e-15);
}

TEST(StepSource, RejectsInvalidSteps) {
  EXPECT_THROW(StepSource({{0.0, 0.0}}), InvalidArgument);
  EXPECT_THROW(StepSource({{0.5, 1.0}, {0.2, 1.0}}), InvalidArgument);
  EXPECT_THROW(StepSource({{-0.1, 1.0}}), InvalidArgument);
  EXPECT_THROW(StepSource({{0.0, 1.0}, {0.05, 1.0}}, 0.1), InvalidArgument);
  EXPECT_THROW(StepSource({{0.0, 1.0}}, 0.0), InvalidArgument);
  EXPECT_NO_THROW(StepSource({{0.0, 1.0}, {0.1, 1.0}}, 0.1));
}

TEST(StepSource, RandomizedPiecewiseAndSumIdentity) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> height(-3.0, 3.0);
  std::uniform_real_distribution<double> gap(0.05, 0.4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Step> steps;
    double c = 0.0;
    const int k = 1 + trial % 5;
    for (int i = 0; i < k; ++i) {
      double h = height(gen);
      if (std::fabs(h) < 1e-3) h = 1.0;
      steps.push_back({c, h});
      c += gap(gen);
    }
    const StepSource q(steps);
    const auto beta = q.levels();
    double sum_q = 0.0, sum_beta = 0.0;
    for (std::size_t i = 0; i < steps.size(); ++i) {
      sum_q += std::fabs(steps[i].height);
      sum_beta += std::fabs(beta[i]);
      const double lo = steps[i].onset;
      const double hi = i + 1 < steps.size() ? steps[i + 1].onset : lo + 1.0;
      for (double f : {0.0, 0.3, 0.999}) ASSERT_EQ(q(lo + f * (hi - lo)), beta[i]);
    }
    ASSERT_LE(sum_q, 2.0 * sum_beta + 1e-12);
  }
}

TEST(StepSource, CellsRoundTrip) {
  Eigen::VectorXd cells(5);
  cells << 1.0, 1.0, 2.0, 2.0, -0.5;
  const auto q = StepSource::from_cells(cells, 0.1);
  EXPECT_EQ(q.steps().size(), 3u);
  const auto back = q.cell_averages(0.1, 5);
  EXPECT_LE((back - cells).cwiseAbs().maxCoeff(), 1e-14);

  const auto avg = e1_q().cell_averages(0.25, 4);
  EXPECT_DOUBLE_EQ(avg[0], 1.0);
  EXPECT_NEAR(avg[1], (1.0 / 12.0 * 1.0 + 1.0 / 6.0 * 2.0) / 0.25, 1e-14);
}

TEST(SourceNorm, Examples) {
  SpectralSource p{Eigen::Vector3d(5.0, 2.0, 1.0) / std::sqrt(30.0)};
  EXPECT_NEAR(source_norm(p), 1.0, 1e-15);
  EXPECT_EQ(source_norm(SpectralSource{Eigen::VectorXd::Zero(4)}), 0.0);
  EXPECT_EQ(source_norm(SpectralSource{Eigen::VectorXd::Constant(1, -2.5)}), 2.5);
}

TEST(StarSource, ValidityAndParams) {
  const StarSource e2(0.5, {0.0, 0.2}, {0.0, 0.0});
  EXPECT_TRUE(e2.is_valid());
  EXPECT_NEAR(e2.radius(0.0), 0.7, 1e-15);
  EXPECT_NEAR(e2.radius(std::numbers::pi / 2), 0.3, 1e-15);
  EXPECT_FALSE(StarSource(0.5, {0.0, 0.6}, {0.0, 0.0}).is_valid());
  EXPECT_FALSE(StarSource(0.95, {0.1}, {0.0}).is_valid());
  const auto round = StarSource::from_params(e2.params());
  EXPECT_EQ(round.params(), e2.params());
  EXPECT_THROW(StarSource::from_params(Eigen::VectorXd::Zero(4)), InvalidArgument);
  EXPECT_THROW(StarSource(0.5, {0.1}, {}), InvalidArgument);
}

TEST(ProjectStar, ConstantSourceClosedForm) {
  const auto basis = enumerate_basis(200.0);
  const auto p = project_constant(basis, basis.size());
  EXPECT_NEAR(p.coeffs[0], 1.4740810161746822, 1e-12);  // 2 sqrt(pi) / j_{0,1}
  for (std::size_t n = 0; n < basis.size(); ++n) {
    if (basis[n].m != 0) EXPECT_EQ(p.coeffs[static_cast<Eigen::Index>(n)], 0.0);
  }
  // The nearly full disc approaches the same coefficients.
  const auto almost = project_star(StarSource::circle(1.0 - 1e-12, 0), basis);
  EXPECT_NEAR(almost.coeffs[0], 1.4740810161746822, 1e-9);
  for (std::size_t n = 0; n < basis.size(); ++n) {
    if (basis[n].m != 0) EXPECT_NEAR(almost.coeffs[static_cast<Eigen::Index>(n)], 0.0, 1e-12);
  }
}

TEST(ProjectStar, HalfRadiusDiscAgainstPolarOracle) {
  const auto basis = enumerate_basis(100.0);
  const auto p = project_star(StarSource::circle(0.5, 0), basis);
  const auto& pair = basis[0];
  const double reference = oracle::polar_midpoint(
      [&](double r, double t) {
        if (r > 0.5) return 0.0;
        return pair.omega * boost::math::cyl_bessel_j(0, pair.sqrt_lambda() * r) +
               0.0 * t;
      },
      2000, 4);
  EXPECT_NEAR(p.coeffs[0], reference, 1e-6);
}

TEST(ProjectStar, E2ShapeAgainstIndependentQuadrature) {
  const auto basis = enumerate_basis(150.0);
  const StarSource shape(0.5, {0.0, 0.2}, {0.0, 0.0});
  const auto p = project_star(shape, basis);
  auto radius = [&](double t) { return 0.5 + 0.2 * std::cos(2.0 * t); };
  for (std::size_t n = 0; n < 12; ++n) {
    EXPECT_NEAR(p.coeffs[static_cast<Eigen::Index>(n)],
                reference_coeff(basis[n], radius, 720, 200), 1e-6)
        << n;
  }
}

TEST(ProjectStar, EvenShapesHaveNoSinComponent) {
  const auto basis = enumerate_basis(300.0);
  const StarSource shape(0.45, {0.05, 0.15, -0.03}, {0.0, 0.0, 0.0});
  const auto p = project_star(shape, basis);
  for (std::size_t n = 0; n < basis.size(); ++n) {
    if (basis[n].phase == Phase::Sin) {
      EXPECT_LE(std::fabs(p.coeffs[static_cast<Eigen::Index>(n)]), 1e-9) << n;
    }
  }
}

TEST(ProjectStar, ShrinkingShapesVanishMonotonically) {
  const auto basis = enumerate_basis(200.0);
  double previous = INFINITY;
  for (double s : {1.0, 0.7, 0.4, 0.2, 0.05, 0.01}) {
    const StarSource shape(0.5 * s, {0.0, 0.2 * s}, {0.1 * s, 0.0});
    const double norm = source_norm(project_star(shape, basis));
    EXPECT_LT(norm, previous) << s;
    previous = norm;
  }
  EXPECT_LT(previous, 0.02);
}

TEST(ProjectStar, RejectsInvalidShape) {
  const auto basis = enumerate_basis(50.0);
  EXPECT_THROW(project_star(StarSource(0.5, {0.7}, {0.0}), basis), InvalidArgument);
}

TEST(SpectralSource, EvaluateSynthesizes) {
  const auto basis = enumerate_basis(15.0);
  SpectralSource p{Eigen::Vector3d(1.0, 0.0, 2.0)};
  const double r = 0.4, t = 0.9;
  EXPECT_NEAR(p.evaluate(basis, r, t),
              eigenfunction_eval(basis[0], r, t) + 2.0 * eigenfunction_eval(basis[2], r, t),
              1e-15);
  SpectralSource too_long{Eigen::VectorXd::Zero(4)};
  EXPECT_THROW(too_long.evaluate(basis, 0.1, 0.1), InvalidArgument);
}
