#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "heatinv/angles.hpp"
#include "heatinv/error.hpp"

using namespace heatinv;
using angles::Fraction;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(Resonance, Examples) {
  const auto quarter = angles::is_resonant(0.3 + kPi / 4, 0.3, 4);
  EXPECT_TRUE(quarter.resonant);
  EXPECT_EQ(quarter.k, 4);
  EXPECT_EQ(std::labs(quarter.j), 1);
  EXPECT_FALSE(angles::is_resonant(0.3 + kPi / 4, 0.3, 3).resonant);
  EXPECT_FALSE(angles::is_resonant(0.0, 13.0 * kPi / 32.0, 31).resonant);
  EXPECT_TRUE(angles::is_resonant(0.0, 13.0 * kPi / 32.0, 32).resonant);
  EXPECT_FALSE(angles::is_resonant(1.0, 0.0, 100).resonant);
}

TEST(Resonance, AllSmallRationalsAreDetected) {
  for (int k = 1; k <= 10; ++k) {
    for (int j = 1; j < k; ++j) {
      if (std::gcd(j, k) != 1) continue;
      for (double base : {0.0, 0.7, -2.1}) {
        const auto r = angles::is_resonant(base, base + static_cast<double>(j) / k * kPi, k);
        EXPECT_TRUE(r.resonant) << j << '/' << k;
        EXPECT_EQ(r.k, k) << j << '/' << k;
      }
    }
  }
}

TEST(GapReport, NearestBelowQuarterForB29) {
  const auto rep = angles::gap_report(29);
  ASSERT_TRUE(rep.nearest_below.has_value());
  EXPECT_EQ(*rep.nearest_below, (Fraction{4, 17}));
  EXPECT_EQ(rep.gap_below.left, (Fraction{4, 17}));
  EXPECT_EQ(rep.gap_below.right, (Fraction{1, 4}));
  EXPECT_NEAR(rep.gap_below.length_pi(), 1.0 / 68.0, 1e-15);
  EXPECT_NEAR(rep.gap_below.length_degrees(), 2.65, 0.01);
  // With every denominator admitted, 6/25 and 5/21 sit closer to 1/4.
  const auto all = angles::gap_report(29, {1, 4}, angles::Denominators::All);
  EXPECT_EQ(*all.nearest_below, (Fraction{6, 25}));
}

TEST(GapReport, IntervalAboveQuarterForB17) {
  // Neither denominator set leaves (1/4, 4/13) zero-free: 3/11 (prime) and
  // 4/15 (all) fall inside it.
  const auto prime = angles::gap_report(17);
  EXPECT_EQ(prime.gap_above.left, (Fraction{1, 4}));
  EXPECT_EQ(prime.gap_above.right, (Fraction{3, 11}));
  const auto all = angles::gap_report(17, {1, 4}, angles::Denominators::All);
  EXPECT_EQ(all.gap_above.right, (Fraction{4, 15}));
  EXPECT_NEAR(all.gap_above.length_degrees(), 3.0, 1e-12);
}

TEST(GapReport, SmallDenominatorsByHand) {
  const auto rep = angles::gap_report(3);
  ASSERT_EQ(rep.fractions.size(), 1u);
  EXPECT_EQ(rep.fractions[0], (Fraction{1, 2}));
  ASSERT_EQ(rep.gaps.size(), 2u);
  EXPECT_EQ(rep.gaps[0].left, (Fraction{0, 1}));
  EXPECT_EQ(rep.gaps[1].right, (Fraction{1, 1}));
  EXPECT_EQ(rep.gap_below.left, (Fraction{0, 1}));
  EXPECT_EQ(rep.gap_above.right, (Fraction{1, 2}));
  EXPECT_THROW(angles::gap_report(2), InvalidArgument);
  EXPECT_THROW(angles::gap_report(29, {5, 4}), InvalidArgument);
  const auto all = angles::gap_report(6, {1, 4}, angles::Denominators::All);
  EXPECT_EQ(all.fractions.size(), 9u);  // 1/2, 1/3, 2/3, 1/4, 3/4, 1/5..4/5
}

TEST(GapReport, Properties) {
  for (int b_max : {5, 11, 17, 29, 40}) {
   for (auto set : {angles::Denominators::Prime, angles::Denominators::All}) {
    const auto rep = angles::gap_report(b_max, {1, 4}, set);
    const auto admissible = [&](long b) {
      if (set == angles::Denominators::All) return true;
      for (long d = 2; d * d <= b; ++d) {
        if (b % d == 0) return false;
      }
      return b >= 2;
    };
    double total = 0.0;
    for (const auto& g : rep.gaps) total += g.length_radians();
    EXPECT_NEAR(total, kPi, 1e-12);
    for (std::size_t i = 0; i < rep.fractions.size(); ++i) {
      const auto& f = rep.fractions[i];
      EXPECT_EQ(std::gcd(f.num, f.den), 1);
      EXPECT_LT(f.den, b_max);
      EXPECT_GT(f.num, 0);
      EXPECT_LT(f.num, f.den);
      if (i > 0) EXPECT_LT(rep.fractions[i - 1].num * f.den, f.num * rep.fractions[i - 1].den);
    }
    // No fraction lies strictly inside a gap (exact cross-multiplication).
    for (const auto& g : rep.gaps) {
      for (long b = 2; b < b_max; ++b) {
        if (!admissible(b)) continue;
        for (long a = 1; a < b; ++a) {
          const bool inside = a * g.left.den > g.left.num * b && a * g.right.den < g.right.num * b;
          ASSERT_FALSE(inside) << a << '/' << b;
        }
      }
    }
   }
  }
}

TEST(GapReport, SmallKWindowNearQuarter) {
  // k <= 10 (b_max = 11).
  const auto all = angles::gap_report(11, {1, 4}, angles::Denominators::All);
  EXPECT_EQ(all.gap_below.left, (Fraction{2, 9}));
  EXPECT_EQ(all.gap_above.right, (Fraction{2, 7}));
  EXPECT_NEAR(all.gap_above.length_degrees(), 45.0 / 7.0, 1e-9);
  const auto prime = angles::gap_report(11);
  EXPECT_EQ(prime.gap_below.left, (Fraction{1, 5}));
  EXPECT_EQ(prime.gap_above.right, (Fraction{2, 7}));
}

TEST(GapReport, CsvLayout) {
  std::ostringstream out;
  angles::write_gap_csv(out, angles::gap_report(5, {1, 4}, angles::Denominators::All));
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "fraction,position,left_gap,right_gap");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 5);  // 1/4, 1/3, 1/2, 2/3, 3/4
}

TEST(UsableModes, Examples) {
  const auto basis = enumerate_basis(800.0);
  const double cutoff = std::log(1000.0) / 0.01;
  EXPECT_NEAR(cutoff, 690.7755, 1e-4);
  std::size_t expected = 0;
  for (const auto& p : basis) expected += p.lambda <= cutoff;
  EXPECT_EQ(angles::usable_mode_count(0.01, 0.01, basis), expected);
  EXPECT_EQ(usable_mode_count(0.01, 0.999999, basis), basis.count_up_to(std::log(10.0 / 0.999999) / 0.01));
  EXPECT_EQ(usable_mode_count(1e-6, 0.01, basis), basis.size());
}
