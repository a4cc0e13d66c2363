#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "heatinv/eigensystem.hpp"

/// Observation-angle conditioning: two boundary sensors at theta_1, theta_2
/// cannot separate the Cos/Sin partners of order m when
/// m (theta_1 - theta_2) is a multiple of pi.
namespace heatinv::angles {

/// Reduced fraction a/b, used for angles in units of pi.
struct Fraction {
  long num = 0;
  long den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Fraction&, const Fraction&) = default;
};

struct Resonance {
  bool resonant = false;
  int k = 0;   // witness order
  long j = 0;  // k (theta1 - theta2) ~= j pi
};

/// True iff |sin(k (theta1 - theta2))| < 1e-12 for some 1 <= k <= k_max.
Resonance is_resonant(double theta1, double theta2, int k_max);

/// Zero-free open interval (left, right), endpoints in units of pi.
struct Gap {
  Fraction left;
  Fraction right;

  double length_pi() const { return right.value() - left.value(); }
  double length_radians() const;
  double length_degrees() const;
};

/// Which denominators b < b_max contribute zeros a/b.
enum class Denominators {
  Prime,  // prime b only
  All,    // every b >= 2
};

struct GapReport {
  int b_max = 0;
  Denominators denominators = Denominators::Prime;
  /// The reference zero (pi/4 by default); treated as a zero of its own.
  Fraction query{1, 4};
  /// Reduced a/b in (0, 1) with admissible b < b_max, ascending.
  std::vector<Fraction> fractions;
  /// Consecutive intervals between 0, the fractions, and 1.
  std::vector<Gap> gaps;
  /// Largest fraction strictly below / smallest strictly above the query.
  std::optional<Fraction> nearest_below;
  std::optional<Fraction> nearest_above;
  /// Zero-free intervals (nearest_below, query) and (query, nearest_above);
  /// 0 and 1 stand in for a missing neighbour.
  Gap gap_below;
  Gap gap_above;

  const Gap& widest_gap() const;
};

/// Enumerates reduced fractions a/b in (0, 1) with admissible b < b_max
/// (b_max >= 3) and the gaps between them.
GapReport gap_report(int b_max, Fraction query = {1, 4},
                     Denominators denominators = Denominators::Prime);

/// Largest N with e^{-lambda_N dt} >= delta / 10, i.e. the number of modes
/// with lambda <= ln(10 / delta) / dt.
std::size_t usable_mode_count(double dt, double delta, const EigenBasis& basis);

/// CSV rows "fraction,position,left_gap,right_gap"; position is a/b in units
/// of pi, gaps are in radians.
void write_gap_csv(std::ostream& out, const GapReport& report);

}  // namespace heatinv::angles

namespace heatinv {
using angles::usable_mode_count;
}
