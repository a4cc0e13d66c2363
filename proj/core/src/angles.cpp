#include "heatinv/angles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>

#include "heatinv/error.hpp"

namespace heatinv::angles {

Resonance is_resonant(double theta1, double theta2, int k_max) {
  if (k_max < 1) throw InvalidArgument("is_resonant: k_max must be >= 1");
  const double diff = theta1 - theta2;
  for (int k = 1; k <= k_max; ++k) {
    if (std::fabs(std::sin(k * diff)) < 1e-12) {
      return {true, k, std::lround(k * diff / std::numbers::pi)};
    }
  }
  return {};
}

double Gap::length_radians() const { return length_pi() * std::numbers::pi; }
double Gap::length_degrees() const { return length_pi() * 180.0; }

const Gap& GapReport::widest_gap() const {
  return *std::max_element(gaps.begin(), gaps.end(), [](const Gap& a, const Gap& b) {
    return a.length_pi() < b.length_pi();
  });
}

namespace {

bool is_prime(long b) {
  if (b < 2) return false;
  for (long d = 2; d * d <= b; ++d) {
    if (b % d == 0) return false;
  }
  return true;
}

bool less(const Fraction& x, const Fraction& y) { return x.num * y.den < y.num * x.den; }

}  // namespace

GapReport gap_report(int b_max, Fraction query, Denominators denominators) {
  if (b_max < 3) throw InvalidArgument("gap_report: b_max must be >= 3");
  if (query.den <= 0 || !(query.num > 0 && query.num < query.den)) {
    throw InvalidArgument("gap_report: query must be a fraction in (0, 1)");
  }
  const long g = std::gcd(query.num, query.den);
  query = {query.num / g, query.den / g};

  GapReport report;
  report.b_max = b_max;
  report.denominators = denominators;
  report.query = query;
  for (long b = 2; b < b_max; ++b) {
    if (denominators == Denominators::Prime && !is_prime(b)) continue;
    for (long a = 1; a < b; ++a) {
      if (std::gcd(a, b) == 1) report.fractions.push_back({a, b});
    }
  }
  std::sort(report.fractions.begin(), report.fractions.end(), less);

  Fraction previous{0, 1};
  for (const auto& f : report.fractions) {
    report.gaps.push_back({previous, f});
    previous = f;
  }
  report.gaps.push_back({previous, Fraction{1, 1}});

  for (const auto& f : report.fractions) {
    if (less(f, query)) report.nearest_below = f;
    if (less(query, f) && !report.nearest_above) report.nearest_above = f;
  }
  report.gap_below = {report.nearest_below.value_or(Fraction{0, 1}), query};
  report.gap_above = {query, report.nearest_above.value_or(Fraction{1, 1})};
  return report;
}

std::size_t usable_mode_count(double dt, double delta, const EigenBasis& basis) {
  if (!(dt > 0.0)) throw InvalidArgument("usable_mode_count: dt must be positive");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidArgument("usable_mode_count: delta must lie in (0, 1)");
  }
  return basis.count_up_to(std::log(10.0 / delta) / dt);
}

void write_gap_csv(std::ostream& out, const GapReport& report) {
  const auto old_precision = out.precision(17);
  out << "fraction,position,left_gap,right_gap\n";
  for (std::size_t i = 0; i < report.fractions.size(); ++i) {
    const auto& f = report.fractions[i];
    out << f.num << '/' << f.den << ',' << f.value() << ','
        << report.gaps[i].length_radians() << ',' << report.gaps[i + 1].length_radians()
        << '\n';
  }
  out.precision(old_precision);
}

}  // namespace heatinv::angles
