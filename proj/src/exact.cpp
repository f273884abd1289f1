#include <qmax/exact.hpp>

#include <qmax/errors.hpp>
#include <qmax/rational.hpp>
#include <qmax/special.hpp>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace qmax::exact {

namespace {

constexpr long kMaxIterations = 200000000L;

// Refresh the incrementally maintained power every so often so rounding
// drift cannot accumulate over millions of multiplies.
constexpr long kPowerRefresh = 4096;

long double int_pow(long double base, int e) {
  long double r = 1.0L;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

__int128 ipow128(long long base, int e) {
  const __int128 limit = static_cast<__int128>(1) << 126;
  __int128 r = 1;
  for (int i = 0; i < e; ++i) {
    if (base > 0 && r > limit / base)
      throw std::overflow_error("integer power exceeds the 128-bit working range");
    r *= base;
  }
  return r;
}

}  // namespace

double tail_probability(const TrafficIntensity& ti, long l) {
  if (l < 0) throw std::invalid_argument("tail_probability: l must be >= 0");
  if (l == 0) return 1.0;  // the maximum is at least 1 in every busy period
  if (ti.is_critical()) return 1.0 / static_cast<double>(l + 1);
  const double h = ti.h();
  const double num = ti.u() * std::exp(-h * static_cast<double>(l));
  const double den = -std::expm1(-h * static_cast<double>(l + 1));
  return num / den;
}

double pmf(const TrafficIntensity& ti, long l) {
  if (l < 1) throw std::invalid_argument("pmf: the maximum is never below 1");
  if (ti.is_critical())
    return 1.0 / (static_cast<double>(l) * static_cast<double>(l + 1));
  const double h = ti.h();
  const double u = ti.u();
  const double num = u * u * std::exp(-h * static_cast<double>(l - 1));
  const double den = (-std::expm1(-h * static_cast<double>(l))) *
                     (-std::expm1(-h * static_cast<double>(l + 1)));
  return num / den;
}

double gamblers_ruin_prob(double p, long v, long w) {
  if (!(p > 0.0) || !(p < 1.0))
    throw std::domain_error("gamblers_ruin_prob: requires 0 < p < 1");
  if (v < 1 || w < 0)
    throw std::invalid_argument("gamblers_ruin_prob: requires v >= 1 and w >= 0");
  if (w == 0) return 1.0;  // already at the target
  if (p == 0.5) return static_cast<double>(v) / static_cast<double>(v + w);
  // r = log((1-p)/p); the success probability is expm1(v r) / expm1((v+w) r).
  const double r = std::log1p((1.0 - 2.0 * p) / p);
  const double top = static_cast<double>(v + w) * r;
  if (top < 700.0) {
    return std::expm1(static_cast<double>(v) * r) / std::expm1(top);
  }
  // Large positive exponent: divide through by e^((v+w) r) first.
  const double a = -std::expm1(-static_cast<double>(v) * r);
  const double b = -std::expm1(-top);
  return std::exp(-static_cast<double>(w) * r) * (a / b);
}

long long backward_difference(int k, long long m) {
  if (k < 1) throw std::invalid_argument("backward_difference: requires k >= 1");
  if (m < 1) throw std::invalid_argument("backward_difference: requires m >= 1");
  const __int128 d = ipow128(m, k) - ipow128(m - 1, k);
#ifndef NDEBUG
  {
    // Binomial route: m^k - (m-1)^k = -sum_{j<k} binom(k,j) (-1)^(k-j) m^j.
    __int128 s = 0;
    __int128 binom = 1;  // binom(k, j), built incrementally
    for (int j = 0; j < k; ++j) {
      __int128 term = binom * ipow128(m, j);
      if ((k - j) % 2 != 0) term = -term;
      s -= term;
      binom = binom * (k - j) / (j + 1);
    }
    assert(s == d && "backward_difference: binomial and power forms disagree");
  }
#endif
  if (d > std::numeric_limits<long long>::max())
    throw std::overflow_error("backward_difference: result exceeds 64 bits");
  return static_cast<long long>(d);
}

std::vector<std::uint64_t> sigma_sieve(int k, long n_max) {
  if (k < 0) throw std::invalid_argument("sigma_sieve: requires k >= 0");
  if (n_max < 1) throw std::invalid_argument("sigma_sieve: requires n_max >= 1");
  // sigma_k(n) < n^(k+1) for n >= 2; stay inside uint64.
  if ((k + 1) * std::log2(static_cast<double>(n_max)) >= 63.0)
    throw std::domain_error("sigma_sieve: n_max^(k+1) exceeds the 64-bit budget");
  std::vector<std::uint64_t> sig(static_cast<std::size_t>(n_max) + 1, 0);
  for (long d = 1; d <= n_max; ++d) {
    std::uint64_t dk = 1;
    for (int i = 0; i < k; ++i) dk *= static_cast<std::uint64_t>(d);
    for (long m = d; m <= n_max; m += d) sig[static_cast<std::size_t>(m)] += dk;
  }
  return sig;
}

double lambert_s_direct(int k, const TrafficIntensity& ti, const Tolerance& tol) {
  if (k < 0) throw std::invalid_argument("lambert_s_direct: requires k >= 0");
  ti.require_subcritical("lambert_s_direct (the series diverges at lambda = 1)");
  const long double lam = ti.lambda();
  const long double h = ti.h();
  long double sum = 0.0L;
  long double pw = 1.0L;  // lambda^m
  for (long m = 1; m <= kMaxIterations; ++m) {
    pw *= lam;
    if (m % kPowerRefresh == 0) pw = expl(-h * static_cast<long double>(m));
    const long double gap = 1.0L - pw;
    sum += int_pow(static_cast<long double>(m), k) * pw / gap;
    // Once the term ratio rho = lambda ((m+1)/m)^k drops below 1, the tail
    // is at most t_(m+1) / (1 - rho).
    const long double rho =
        lam * int_pow(static_cast<long double>(m + 1) / static_cast<long double>(m), k);
    if (rho < 1.0L) {
      const long double next_pw = pw * lam;
      const long double t_next =
          int_pow(static_cast<long double>(m + 1), k) * next_pw / (1.0L - next_pw);
      if (t_next / (1.0L - rho) <= tol.rel_tol * sum) return static_cast<double>(sum);
    }
  }
  throw ConvergenceError("lambert_s_direct: tail bound not met within the iteration cap");
}

double lambert_s_divisor(int k, const TrafficIntensity& ti, const Tolerance& tol) {
  if (k < 0) throw std::invalid_argument("lambert_s_divisor: requires k >= 0");
  ti.require_subcritical("lambert_s_divisor (the series diverges at lambda = 1)");
  const long double lam = ti.lambda();
  const long double h = ti.h();

  // Choose the horizon from the direct-sum bound with sigma_k(n) <= n^(k+1),
  // conservatively against the smallest possible total, which is at least
  // the first term lambda/(1-lambda) >= lambda.
  long n_top = 16;
  for (;; n_top *= 2) {
    if (n_top > kMaxIterations)
      throw ConvergenceError("lambert_s_divisor: no horizon meets the tolerance");
    const long double rho = lam * int_pow(static_cast<long double>(n_top + 1) /
                                              static_cast<long double>(n_top),
                                          k + 1);
    if (rho >= 1.0L) continue;
    const long double pw = expl(-h * static_cast<long double>(n_top + 1));
    const long double t_next =
        int_pow(static_cast<long double>(n_top + 1), k + 1) * pw / (1.0L - pw);
    if (t_next / (1.0L - rho) <= tol.rel_tol * lam) break;
  }

  // Blocked sieve so memory stays bounded for large horizons.
  constexpr long kBlock = 1L << 20;
  long double sum = 0.0L;
  std::vector<std::uint64_t> dk_cache;
  const bool fits_u64 = (k + 1) * std::log2(static_cast<double>(n_top)) < 63.0;
  if (!fits_u64)
    throw std::domain_error("lambert_s_divisor: divisor sums exceed the 64-bit budget");
  for (long lo = 1; lo <= n_top; lo += kBlock) {
    const long hi = std::min(n_top, lo + kBlock - 1);
    std::vector<long double> sig(static_cast<std::size_t>(hi - lo + 1), 0.0L);
    for (long d = 1; d <= hi; ++d) {
      const long double dk = int_pow(static_cast<long double>(d), k);
      long m = ((lo + d - 1) / d) * d;
      for (; m <= hi; m += d) sig[static_cast<std::size_t>(m - lo)] += dk;
    }
    long double pw = expl(-h * static_cast<long double>(lo));  // lambda^n
    for (long n = lo; n <= hi; ++n) {
      sum += sig[static_cast<std::size_t>(n - lo)] * pw;
      pw *= lam;
      if ((n - lo + 1) % kPowerRefresh == 0) pw = expl(-h * static_cast<long double>(n + 1));
    }
  }
  return static_cast<double>(sum);
}

double moment(int k, const TrafficIntensity& ti, const Tolerance& tol) {
  if (k < 1) throw std::invalid_argument("moment: requires k >= 1");
  ti.require_subcritical("moment");
  long double acc = 0.0L;
  for (int j = 0; j < k; ++j) {
    const double binom = Rational::binomial(static_cast<unsigned long>(k),
                                            static_cast<unsigned long>(j))
                             .to_double();
    const long double s = lambert_s_direct(j, ti, tol);
    const long double term = static_cast<long double>(binom) * s;
    acc += ((k - 1 - j) % 2 == 0) ? term : -term;
  }
  return static_cast<double>(acc * static_cast<long double>(ti.u()) /
                             static_cast<long double>(ti.lambda()));
}

double brute_force_moment(int k, const TrafficIntensity& ti, long l_max, const Tolerance& tol) {
  if (k < 1) throw std::invalid_argument("brute_force_moment: requires k >= 1");
  if (l_max < 1) throw std::invalid_argument("brute_force_moment: requires l_max >= 1");
  ti.require_subcritical("brute_force_moment");
  const long double h = ti.h();
  const long double u = ti.u();
  long double sum = 0.0L;
  long double pw = 1.0L;  // lambda^(l-1)
  for (long l = 1; l <= l_max; ++l) {
    const long double d1 = -expm1l(-h * static_cast<long double>(l));
    const long double d2 = -expm1l(-h * static_cast<long double>(l + 1));
    sum += int_pow(static_cast<long double>(l), k) * u * u * pw / (d1 * d2);
    pw *= 1.0L - u;
    if (l % kPowerRefresh == 0) pw = expl(-h * static_cast<long double>(l));
  }
  // Tail: pmf(l) <= lambda^(l-1), so the remainder past l_max is below
  // (l_max+1)^k lambda^l_max / (1 - rho) with rho = lambda ((l_max+2)/(l_max+1))^k.
  const long double rho = (1.0L - u) * int_pow(static_cast<long double>(l_max + 2) /
                                                   static_cast<long double>(l_max + 1),
                                               k);
  if (rho >= 1.0L)
    throw ConvergenceError(
        "brute_force_moment: l_max too small for the tail to decay; increase l_max");
  const long double bound =
      int_pow(static_cast<long double>(l_max + 1), k) * pw / (1.0L - rho);
  if (bound > tol.rel_tol * sum)
    throw ConvergenceError("brute_force_moment: tail bound " + std::to_string((double)bound) +
                           " exceeds the tolerance at l_max = " + std::to_string(l_max));
  return static_cast<double>(sum);
}

double integral_I(int j, const TrafficIntensity& ti) {
  if (j < 0) throw std::invalid_argument("integral_I: requires j >= 0");
  ti.require_subcritical("integral_I");
  const double h = ti.h();
  if (j == 0) return ti.log_term() / h;
  long double acc = 0.0L;
  for (int i = 0; i <= j; ++i) {
    const double binom = Rational::binomial(static_cast<unsigned long>(j),
                                            static_cast<unsigned long>(i))
                             .to_double();
    const double fact = Rational::factorial(static_cast<unsigned long>(i)).to_double();
    acc += static_cast<long double>(binom) * fact *
           special::polylog(i + 1, ti.lambda()) /
           int_pow(static_cast<long double>(h), i + 1);
  }
  return static_cast<double>(acc);
}

double q_digamma(double q, double x, const Tolerance& tol) {
  if (!(q > 0.0) || !(q < 1.0)) throw std::domain_error("q_digamma: requires 0 < q < 1");
  if (!(x > 0.0)) throw std::domain_error("q_digamma: requires x > 0");
  const long double lq = std::log(q);
  const long double qx = expl(static_cast<long double>(x) * lq);
  const long double one_minus_q = 1.0L - static_cast<long double>(q);
  const long double gap0 = (1.0L - qx) * one_minus_q;
  long double sum = 0.0L;
  long double pw = qx;  // q^(n+x)
  for (long n = 0; n <= kMaxIterations; ++n) {
    sum += pw / (1.0L - pw);
    pw *= q;
    if ((n + 1) % kPowerRefresh == 0)
      pw = expl((static_cast<long double>(x) + n + 1) * lq);
    // Remaining tail <= q^(x+n+1) / ((1-q^x)(1-q)).
    if (pw / gap0 <= tol.rel_tol * (sum > 0.0L ? sum : 1.0L))
      return static_cast<double>(-std::log1p(-q) + lq * sum);
  }
  throw ConvergenceError("q_digamma: series did not meet tolerance");
}

double equilibrium_mean(const TrafficIntensity& ti) {
  ti.require_subcritical("equilibrium_mean");
  return ti.lambda() / ti.u();
}

}  // namespace qmax::exact
