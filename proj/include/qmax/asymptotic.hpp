#ifndef QMAX_ASYMPTOTIC_HPP
#define QMAX_ASYMPTOTIC_HPP

#include <qmax/rational.hpp>
#include <qmax/series.hpp>

#include <functional>
#include <vector>

namespace qmax::asymptotic {

/// The h-independent constant attached to a small-h expansion: either an
/// exact rational, j! * zeta(j+1), or the Euler-Mascheroni constant, kept
/// symbolic until evaluation.
struct IntegralConstant {
  enum class Kind { rational, factorial_zeta, euler_gamma };
  Kind kind = Kind::rational;
  Rational coeff;      // the rational itself, or the multiplier of zeta/gamma
  int zeta_index = 0;  // only for factorial_zeta

  double to_double() const;
};

/// Taylor coefficients b_0, b_1, ... of a function f at 0 together with the
/// value of its associated integral constant. Feed to zagier_expansion.
struct TaylorCoeffs {
  std::vector<Rational> coeffs;
  IntegralConstant integral;
};

/// f_j(y) = y^j / (e^y - 1): b_m = B_(m-j+1) / (m-j+1)! for m >= j-1,
/// zero below; the integral constant is j! zeta(j+1). j >= 1.
TaylorCoeffs taylor_coeffs_f_j(int j, int n_terms);

/// f*(y) = 1/(e^y - 1) - e^-y / y: b_n = (B_(n+1) - (-1)^(n+1)) / (n+1)!;
/// the integral constant is the Euler-Mascheroni constant.
TaylorCoeffs taylor_coeffs_f_star(int n_terms);

using ExpansionTermTable = series::HExpansion;

/// Small-h expansion of g(h) = sum_{m>=1} f(m h):
///   g(h) ~ I_f / h + sum_{n>=0} b_n B_(n+1) (-1)^n h^n / (n+1),
/// truncated after n = order - 1. Requires at least `order` coefficients.
ExpansionTermTable zagier_expansion(const TaylorCoeffs& f, int order);

/// Expansion of S_j(lambda) in h = -log(lambda) for j >= 1:
/// j! zeta(j+1) / h^(j+1) plus rational powers h^-1 .. h^(order-2).
/// The underlying Taylor series terminates, so past its last nonzero term
/// the table is exact up to an exponentially small remainder.
ExpansionTermTable s_j_h_expansion(int j, int order);

/// Expansion of S_0(lambda): (log(1/(1-lambda)) + gamma)/h plus rational
/// powers h^0 .. h^(order-1).
ExpansionTermTable s_0_h_expansion(int order);

/// True when the S_j h-table terminates. Coefficient n carries the product
/// B_(n-j+1) B_(n+1); for odd j one of the two indices is an odd number
/// >= 3 whenever n > j, so only finitely many terms survive and the table
/// is exact up to an exponentially small remainder.
bool s_j_expansion_is_finite(int j);

/// Re-expands an h-power table in u = 1 - lambda via h = -log(1-u),
/// using the exact Cauchy-number series for 1/h.
series::LogLaurentSeries to_u_series(const ExpansionTermTable& table, int u_order);

/// Series for Ex[L^k] in u: the alternating binomial combination of the
/// S_j expansions times (1-lambda)/lambda. Lowest power is -(k-1) for
/// k >= 2 and 0 for k = 1.
series::LogLaurentSeries moment_expansion(int k, int order);

/// Series for Var[L] = Ex[L^2] - Ex[L]^2.
series::LogLaurentSeries variance_expansion(int order);

/// Empirical convergence-order fit of an h-expansion against an exact
/// evaluator: for each truncation threshold P (keep powers < P), least
/// squares of log|error| against log h over the grid.
struct AccuracyFit {
  int keep_below;  // truncation threshold
  double slope;    // fitted exponent
  bool monotone;   // errors strictly decreasing as h decreases
};

std::vector<AccuracyFit> order_of_accuracy_check(
    const ExpansionTermTable& table, const std::function<double(double)>& exact_of_h,
    const std::vector<double>& h_grid);

}  // namespace qmax::asymptotic

#endif  // QMAX_ASYMPTOTIC_HPP
