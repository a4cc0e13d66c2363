#pragma once

#include <vector>

/// Integer-order Bessel functions of the first kind and their zeros.
///
/// Accuracy target: absolute error below 1e-12 on 0 <= x <= 500 for orders
/// up to 60; zeros to 1e-10 absolute. All functions are pure.
namespace heatinv::bessel {

/// J_m(x) for m >= 0, x >= 0.
///
/// Power series for x <= 12; above that, Miller's backward recurrence
/// normalized with the Neumann sum J_0 + 2 * sum J_{2k} = 1.
double j(int m, double x);

/// J_m'(x) = (J_{m-1}(x) - J_{m+1}(x)) / 2, with J_{-1} = -J_1.
double j_prime(int m, double x);

/// The k-th positive zero j_{m,k} of J_m (k >= 1).
///
/// Throws ConvergenceError if the bracketed Newton iteration fails.
double zero(int m, int k);

/// The first `count` positive zeros of J_m, ascending.
std::vector<double> zeros(int m, int count);

/// All positive zeros of J_m that are <= x_max, ascending.
std::vector<double> zeros_below(int m, double x_max);

}  // namespace heatinv::bessel
