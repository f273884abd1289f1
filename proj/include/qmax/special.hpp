#ifndef QMAX_SPECIAL_HPP
#define QMAX_SPECIAL_HPP

#include <qmax/rational.hpp>

namespace qmax::special {

/// Largest index for which exact Bernoulli and Cauchy numbers are cached.
inline constexpr int kMaxExactIndex = 128;

/// Bernoulli number B_n, convention B_1 = -1/2 (generating function
/// t / (e^t - 1)). Exact; cached up to kMaxExactIndex.
const Rational& bernoulli_number(int n);

/// Bernoulli polynomial B_n(y) via the explicit binomial sum.
double bernoulli_polynomial(int n, double y);
Rational bernoulli_polynomial_exact(int n, const Rational& y);

/// Cauchy number C_n (Bernoulli number of the second kind scaled by n!),
/// generating function t / log(1 + t). Exact; cached up to kMaxExactIndex.
const Rational& cauchy_number(int n);

/// zeta(k) for integer k >= 2, by direct summation with an analytic tail
/// correction. Accurate to full double precision.
double riemann_zeta(int k);

/// Polylogarithm Li_k(x) = sum_{n>=1} x^n / n^k for integer k >= 1 and
/// 0 <= x < 1.
double polylog(int k, double x);

/// Euler-Mascheroni constant.
constexpr double euler_gamma() { return 0.57721566490153286061; }

}  // namespace qmax::special

#endif  // QMAX_SPECIAL_HPP
