#ifndef QMAX_EXACT_HPP
#define QMAX_EXACT_HPP

#include <qmax/traffic.hpp>

#include <cstdint>
#include <vector>

namespace qmax::exact {

/// Pr[L > l] for the maximum queue length L during a busy period:
/// (1-lambda) lambda^l / (1 - lambda^(l+1)), and 1/(l+1) at lambda = 1.
/// l >= 0.
double tail_probability(const TrafficIntensity& ti, long l);

/// Pr[L = l] for l >= 1. Algebraically
/// (1-lambda)^2 lambda^(l-1) / ((1 - lambda^l)(1 - lambda^(l+1))),
/// the difference of adjacent tails with the cancellation removed;
/// 1/(l(l+1)) at lambda = 1.
double pmf(const TrafficIntensity& ti, long l);

/// Probability that a random walk started at v with up-probability p
/// reaches v + w before 0. Reduces to v/(v+w) at p = 1/2; w = 0 returns 1.
double gamblers_ruin_prob(double p, long v, long w);

/// m^k - (m-1)^k for k >= 1, m >= 1, computed exactly.
long long backward_difference(int k, long long m);

/// sigma_k(n) = sum of k-th powers of divisors, for n = 1..n_max.
/// Entry 0 is unused. Rejects arguments whose largest value would not fit
/// in 64 bits.
std::vector<std::uint64_t> sigma_sieve(int k, long n_max);

/// S_k(lambda) = sum_{m>=1} m^k lambda^m / (1 - lambda^m), summed directly
/// with a geometric tail bound. Requires lambda < 1.
double lambert_s_direct(int k, const TrafficIntensity& ti, const Tolerance& tol = Tolerance());

/// The same sum through its power-series form sum_n sigma_k(n) lambda^n.
double lambert_s_divisor(int k, const TrafficIntensity& ti, const Tolerance& tol = Tolerance());

/// Ex[L^k] for k >= 1 via the finite alternating combination of S_0..S_(k-1).
double moment(int k, const TrafficIntensity& ti, const Tolerance& tol = Tolerance());

/// Ex[L^k] summed term by term from the distribution up to l_max.
/// Throws ConvergenceError when the geometric tail bound past l_max cannot
/// meet the tolerance.
double brute_force_moment(int k, const TrafficIntensity& ti, long l_max,
                          const Tolerance& tol = Tolerance());

/// Integral of x^j lambda^x / (1 - lambda^x) over [1, infinity) in closed
/// form: j = 0 gives log(1/(1-lambda))/h, otherwise a finite combination of
/// polylogarithms at lambda.
double integral_I(int j, const TrafficIntensity& ti);

/// q-digamma value at x: -log(1-q) + log(q) sum_{n>=0} q^(n+x)/(1-q^(n+x)).
double q_digamma(double q, double x, const Tolerance& tol = Tolerance());

/// Mean queue length in equilibrium, lambda/(1-lambda).
double equilibrium_mean(const TrafficIntensity& ti);

}  // namespace qmax::exact

#endif  // QMAX_EXACT_HPP
