#include "heatinv/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "heatinv/error.hpp"

namespace heatinv::bessel {
namespace {

constexpr double kSeriesLimit = 12.0;
constexpr double kRescale = 1e250;

void check_args(int m, double x) {
  if (m < 0) {
    throw InvalidArgument("bessel: negative order " + std::to_string(m));
  }
  if (!std::isfinite(x)) {
    throw InvalidArgument("bessel: non-finite argument");
  }
  if (x < 0.0) {
    throw InvalidArgument("bessel: negative argument");
  }
}

// Ascending series, accumulated in extended precision: at x = 12 the largest
// term is ~4e3 and cancels down to O(1).
double series(int m, double x) {
  const long double half = static_cast<long double>(x) / 2.0L;
  long double term = 1.0L;
  for (int i = 1; i <= m; ++i) term *= half / i;
  if (term == 0.0L) return 0.0;
  const long double q = -half * half;
  long double sum = term;
  for (int k = 1; k < 500; ++k) {
    term *= q / (static_cast<long double>(k) * (k + m));
    sum += term;
    if (k > half && std::fabs(term) < 1e-21L) break;
  }
  return static_cast<double>(sum);
}

// Miller's algorithm: backward recurrence from far above both m and x,
// normalized by J_0 + 2 (J_2 + J_4 + ...) = 1.
double miller(int m, double x) {
  const double top = std::max(static_cast<double>(m), x);
  int start = static_cast<int>(top + 30.0 + 20.0 * std::cbrt(x));
  start += start % 2;
  const double two_over_x = 2.0 / x;

  double upper = 0.0;     // J_{n+1}
  double current = 1e-30; // J_n
  double result = 0.0;
  double norm = 0.0;
  for (int n = start; n > 0; --n) {
    const double lower = n * two_over_x * current - upper;  // J_{n-1}
    upper = current;
    current = lower;
    const int order = n - 1;
    if (order == m) result = current;
    if (order == 0) {
      norm += current;
    } else if (order % 2 == 0) {
      norm += 2.0 * current;
    }
    if (std::fabs(current) > kRescale) {
      current /= kRescale;
      upper /= kRescale;
      result /= kRescale;
      norm /= kRescale;
    }
  }
  return result / norm;
}

double j_unchecked(int m, double x) {
  if (x == 0.0) return m == 0 ? 1.0 : 0.0;
  if (x <= kSeriesLimit) return series(m, x);
  return miller(m, x);
}

double j_prime_unchecked(int m, double x) {
  if (m == 0) return -j_unchecked(1, x);
  return 0.5 * (j_unchecked(m - 1, x) - j_unchecked(m + 1, x));
}

// Safeguarded Newton on a sign-change bracket [lo, hi].
double refine_zero(int m, int k, double lo, double hi, double f_lo) {
  // McMahon's expansion when it lands inside the bracket, else the midpoint.
  const double beta = (k + 0.5 * m - 0.25) * std::numbers::pi;
  const double mu = 4.0 * m * m;
  double x = beta - (mu - 1.0) / (8.0 * beta);
  if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    const double f = j_unchecked(m, x);
    if (f == 0.0) return x;
    if ((f < 0.0) == (f_lo < 0.0)) {
      lo = x;
      f_lo = f;
    } else {
      hi = x;
    }
    const double df = j_prime_unchecked(m, x);
    double next = (df != 0.0) ? x - f / df : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::fabs(next - x);
    x = next;
    if (step <= 1e-15 * std::max(1.0, x) || hi - lo <= 4e-16 * x) return x;
  }
  std::ostringstream msg;
  msg << "bessel::zero: Newton/bisection did not converge for m=" << m
      << " in bracket [" << lo << ", " << hi << "]";
  throw ConvergenceError(msg.str());
}

// Walks J_m upward in unit steps (consecutive zeros of J_m are more than 3
// apart for every m >= 0) and refines each sign change.
template <typename Stop>
std::vector<double> scan_zeros(int m, Stop stop) {
  std::vector<double> out;
  const double h = 1.0;
  double a = (m == 0) ? 1e-3 : static_cast<double>(m);
  double fa = j_unchecked(m, a);
  const double guard = 1e7;
  while (!stop(out, a)) {
    const double b = a + h;
    const double fb = j_unchecked(m, b);
    if (fb == 0.0) {
      out.push_back(b);
      a = b + 1e-9;
      fa = j_unchecked(m, a);
      continue;
    }
    if ((fa < 0.0) != (fb < 0.0)) {
      const int k = static_cast<int>(out.size()) + 1;
      out.push_back(refine_zero(m, k, a, b, fa));
    }
    a = b;
    fa = fb;
    if (a > guard) throw ConvergenceError("bessel: zero scan ran away");
  }
  return out;
}

}  // namespace

double j(int m, double x) {
  check_args(m, x);
  return j_unchecked(m, x);
}

double j_prime(int m, double x) {
  check_args(m, x);
  return j_prime_unchecked(m, x);
}

std::vector<double> zeros(int m, int count) {
  if (m < 0) throw InvalidArgument("bessel::zeros: negative order");
  if (count < 0) throw InvalidArgument("bessel::zeros: negative count");
  if (count == 0) return {};
  return scan_zeros(m, [count](const std::vector<double>& found, double) {
    return static_cast<int>(found.size()) >= count;
  });
}

std::vector<double> zeros_below(int m, double x_max) {
  if (m < 0) throw InvalidArgument("bessel::zeros_below: negative order");
  if (!std::isfinite(x_max)) {
    throw InvalidArgument("bessel::zeros_below: non-finite bound");
  }
  auto out = scan_zeros(m, [x_max](const std::vector<double>&, double a) {
    return a > x_max;
  });
  while (!out.empty() && out.back() > x_max) out.pop_back();
  return out;
}

double zero(int m, int k) {
  if (k < 1) throw InvalidArgument("bessel::zero: root index must be >= 1");
  return zeros(m, k).back();
}

}  // namespace heatinv::bessel
