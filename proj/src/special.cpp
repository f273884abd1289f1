#include <qmax/special.hpp>

#include <qmax/errors.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace qmax::special {

namespace {

std::vector<Rational> build_bernoulli() {
  // B_0 = 1 and, for n >= 1, sum_{j=0}^{n} binom(n+1, j) B_j = 0.
  std::vector<Rational> b(kMaxExactIndex + 1);
  b[0] = 1;
  for (int n = 1; n <= kMaxExactIndex; ++n) {
    Rational acc = 0;
    for (int j = 0; j < n; ++j)
      acc += Rational::binomial(static_cast<unsigned long>(n) + 1, j) * b[j];
    b[n] = -acc / Rational(n + 1);
  }
  return b;
}

std::vector<Rational> build_cauchy() {
  // With t/log(1+t) = sum c_n t^n, the c_n satisfy c_0 = 1 and
  // c_n = -sum_{j=0}^{n-1} c_j (-1)^(n-j) / (n - j + 1); then C_n = n! c_n.
  std::vector<Rational> c(kMaxExactIndex + 1);
  c[0] = 1;
  for (int n = 1; n <= kMaxExactIndex; ++n) {
    Rational acc = 0;
    for (int j = 0; j < n; ++j) {
      Rational term = c[j] / Rational(n - j + 1);
      if ((n - j) % 2 != 0) term = -term;
      acc += term;
    }
    c[n] = -acc;
  }
  std::vector<Rational> big(kMaxExactIndex + 1);
  for (int n = 0; n <= kMaxExactIndex; ++n)
    big[n] = c[n] * Rational::factorial(static_cast<unsigned long>(n));
  return big;
}

void check_index(int n, const char* what) {
  if (n < 0 || n > kMaxExactIndex)
    throw std::domain_error(std::string(what) + ": index must lie in [0, " +
                            std::to_string(kMaxExactIndex) + "]");
}

}  // namespace

const Rational& bernoulli_number(int n) {
  check_index(n, "bernoulli_number");
  static const std::vector<Rational> table = build_bernoulli();
  return table[n];
}

const Rational& cauchy_number(int n) {
  check_index(n, "cauchy_number");
  static const std::vector<Rational> table = build_cauchy();
  return table[n];
}

Rational bernoulli_polynomial_exact(int n, const Rational& y) {
  check_index(n, "bernoulli_polynomial");
  Rational acc = 0;
  Rational ypow = 1;  // y^(n-k), built from the top power down
  for (int k = n; k >= 0; --k) {
    acc += Rational::binomial(n, k) * bernoulli_number(k) * ypow;
    if (k > 0) ypow *= y;
  }
  return acc;
}

double bernoulli_polynomial(int n, double y) {
  check_index(n, "bernoulli_polynomial");
  double acc = 0.0;
  double ypow = 1.0;
  for (int k = n; k >= 0; --k) {
    acc += Rational::binomial(n, k).to_double() * bernoulli_number(k).to_double() * ypow;
    if (k > 0) ypow *= y;
  }
  return acc;
}

double riemann_zeta(int k) {
  if (k < 2)
    throw std::domain_error("riemann_zeta: requires k >= 2 (the series diverges at k = 1)");
  if (k >= 64) {
    // 2^-k is already below double rounding relative to the leading 1.
    long double s = 1.0L;
    for (int n = 2; n <= 8; ++n) s += powl(static_cast<long double>(n), -static_cast<long double>(k));
    return static_cast<double>(s);
  }
  // Sum n^-k up to N, then add the tail
  //   sum_{n>N} n^-k = N^(1-k)/(k-1) - N^-k/2 + k N^-(k+1)/12 - ...
  // whose first omitted term is below k(k+1)(k+2)/720 * N^-(k+3).
  const double residual = static_cast<double>(k) * (k + 1) * (k + 2) / 720.0;
  long n_top = static_cast<long>(std::ceil(std::pow(residual / 1e-17, 1.0 / (k + 3))));
  n_top = std::clamp(n_top, 16L, 4000000L);
  long double s = 0.0L;
  for (long n = n_top; n >= 1; --n)
    s += powl(static_cast<long double>(n), -static_cast<long double>(k));
  const long double nl = static_cast<long double>(n_top);
  s += powl(nl, static_cast<long double>(1 - k)) / (k - 1);
  s -= 0.5L * powl(nl, -static_cast<long double>(k));
  s += (static_cast<long double>(k) / 12.0L) * powl(nl, -static_cast<long double>(k + 1));
  return static_cast<double>(s);
}

double polylog(int k, double x) {
  if (k < 1) throw std::domain_error("polylog: requires integer k >= 1");
  if (!(x >= 0.0) || !(x < 1.0))
    throw std::domain_error("polylog: requires 0 <= x < 1");
  if (x == 0.0) return 0.0;
  if (k == 1) return -std::log1p(-x);

  const long double xl = x;
  long double sum = 0.0L;
  long double pw = 1.0L;  // x^n
  const long double inv_gap = 1.0L / (1.0L - xl);
  for (long n = 1; n <= 200000000L; ++n) {
    pw *= xl;
    sum += pw / powl(static_cast<long double>(n), k);
    // Terms decay at least geometrically: tail <= x^(n+1) / ((n+1)^k (1-x)).
    const long double tail = pw * xl * inv_gap / powl(static_cast<long double>(n + 1), k);
    if (tail < 1e-16L * sum) return static_cast<double>(sum);
  }
  throw ConvergenceError("polylog: series did not meet tolerance within the iteration cap");
}

}  // namespace qmax::special
