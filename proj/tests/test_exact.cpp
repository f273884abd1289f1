#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <qmax/errors.hpp>
#include <qmax/exact.hpp>
#include <qmax/rational.hpp>
#include <qmax/special.hpp>
#include <qmax/traffic.hpp>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

using qmax::Rational;
using qmax::Tolerance;
using qmax::TrafficIntensity;
namespace ex = qmax::exact;

namespace {

// Pr[L > l] in exact rational arithmetic: (1-lam) lam^l / (1 - lam^(l+1)).
Rational tail_exact(const Rational& lam, long l) {
  const Rational lp = Rational::pow(lam, static_cast<unsigned long>(l));
  return (Rational(1) - lam) * lp / (Rational(1) - lp * lam);
}

// Ruin probability in exact rational arithmetic via r = (1-p)/p:
// (r^v - 1) / (r^(v+w) - 1), and v/(v+w) when r = 1.
Rational ruin_exact(const Rational& p, long v, long w) {
  const Rational r = (Rational(1) - p) / p;
  if (r == Rational(1)) return Rational(v, v + w);
  const Rational num = Rational::pow(r, static_cast<unsigned long>(v)) - Rational(1);
  const Rational den =
      Rational::pow(r, static_cast<unsigned long>(v + w)) - Rational(1);
  return num / den;
}

// Adaptive Simpson quadrature, for checking the closed-form integrals.
double simpson(const std::function<double(double)>& f, double a, double b, double fa,
               double fb, double fm, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = std::fabs(left + right - whole);
  // The relative floor stops refinement once the defect is rounding noise,
  // whatever absolute tolerance was asked for.
  if (depth <= 0 || diff <= 15.0 * tol || diff <= 1e-14 * (std::fabs(left) + std::fabs(right)))
    return left + right + (left + right - whole) / 15.0;
  return simpson(f, a, m, fa, fm, flm, tol / 2.0, depth - 1) +
         simpson(f, m, b, fm, fb, frm, tol / 2.0, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  const double m = 0.5 * (a + b);
  return simpson(f, a, b, f(a), f(b), f(m), tol, 48);
}

}  // namespace

TEST_CASE("tail probability matches the exact rational value") {
  // Dyadic intensities are exact in double, so only evaluation error remains.
  const std::vector<std::pair<double, Rational>> cases = {
      {0.5, Rational(1, 2)},   {0.25, Rational(1, 4)},    {0.75, Rational(3, 4)},
      {0.875, Rational(7, 8)}, {0.984375, Rational(63, 64)}};
  for (const auto& [lam_d, lam_q] : cases) {
    const auto ti = TrafficIntensity::from_lambda(lam_d);
    for (long l = 0; l <= 40; ++l) {
      const double want = tail_exact(lam_q, l).to_double();
      CHECK(std::fabs(ex::tail_probability(ti, l) - want) <= 1e-14 * want);
    }
  }
  // Non-dyadic intensity adds one rounding of lambda itself.
  const auto ti = TrafficIntensity::from_lambda(0.9);
  for (long l = 0; l <= 40; ++l) {
    const double want = tail_exact(Rational(9, 10), l).to_double();
    CHECK(std::fabs(ex::tail_probability(ti, l) - want) <= 1e-13 * want);
  }
}

TEST_CASE("tail probability boundary and shape") {
  const auto ti = TrafficIntensity::from_lambda(0.9);
  CHECK(ex::tail_probability(ti, 0) == 1.0);
  for (long l = 0; l < 60; ++l)
    CHECK(ex::tail_probability(ti, l + 1) < ex::tail_probability(ti, l));
  CHECK_THROWS_AS(ex::tail_probability(ti, -1), std::invalid_argument);
}

TEST_CASE("critical tail and pmf take their limit values") {
  const auto crit = TrafficIntensity::from_lambda(1.0);
  for (long l = 0; l <= 12; ++l) {
    const double want = 1.0 / static_cast<double>(l + 1);
    CHECK(std::fabs(ex::tail_probability(crit, l) - want) <= 1e-15);
  }
  for (long l = 1; l <= 12; ++l) {
    const double want = 1.0 / static_cast<double>(l * (l + 1));
    CHECK(std::fabs(ex::pmf(crit, l) - want) <= 1e-15);
  }
}

TEST_CASE("tail is continuous across the critical point") {
  const auto near = TrafficIntensity::from_u(1e-8);
  for (long l = 0; l <= 10; ++l) {
    const double limit = 1.0 / static_cast<double>(l + 1);
    CHECK(std::fabs(ex::tail_probability(near, l) - limit) <= 1e-6 * limit);
  }
}

TEST_CASE("pmf equals the difference of adjacent tails") {
  for (double lam : {0.3, 0.5, 0.9, 0.99}) {
    const auto ti = TrafficIntensity::from_lambda(lam);
    for (long l = 1; l <= 50; ++l) {
      // The subtraction of adjacent tails loses digits near lambda = 1, so
      // allow their absolute rounding noise on top of the relative term.
      const double diff = ex::tail_probability(ti, l - 1) - ex::tail_probability(ti, l);
      CHECK(std::fabs(ex::pmf(ti, l) - diff) <= 1e-13 * ex::pmf(ti, l) + 1e-15);
    }
  }
  CHECK(ex::pmf(TrafficIntensity::from_lambda(0.5), 1) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(ex::pmf(TrafficIntensity::from_lambda(0.5), 0), std::invalid_argument);
}

TEST_CASE("pmf sums to 1") {
  for (double lam : {0.5, 0.9, 0.95}) {
    const auto ti = TrafficIntensity::from_lambda(lam);
    long double total = 0.0L;
    for (long l = 2000; l >= 1; --l) total += ex::pmf(ti, l);
    CHECK(std::fabs(static_cast<double>(total) - 1.0) <= 1e-12);
  }
}

TEST_CASE("ruin probability matches the exact rational value") {
  {
    const Rational want = ruin_exact(Rational(3, 5), 2, 3);
    CHECK(want == Rational(135, 211));
    CHECK(std::fabs(ex::gamblers_ruin_prob(0.6, 2, 3) - want.to_double()) <= 1e-14);
  }
  {
    const Rational want = ruin_exact(Rational(2, 7), 3, 4);
    CHECK(std::fabs(ex::gamblers_ruin_prob(2.0 / 7.0, 3, 4) - want.to_double()) <=
          1e-13 * want.to_double());
  }
  for (long v = 1; v <= 5; ++v) {
    for (long w = 0; w <= 5; ++w) {
      const Rational want = ruin_exact(Rational(3, 5), v, w);
      CHECK(std::fabs(ex::gamblers_ruin_prob(0.6, v, w) - want.to_double()) <= 1e-14);
    }
  }
}

TEST_CASE("ruin probability limits and symmetric case") {
  CHECK(ex::gamblers_ruin_prob(0.37, 3, 0) == 1.0);
  for (long v = 1; v <= 6; ++v)
    CHECK(std::fabs(ex::gamblers_ruin_prob(0.5, v, 10 - v) - v / 10.0) <= 1e-15);
  // Large spans: the favorable walk approaches 1 - ((1-p)/p)^v, the
  // unfavorable one vanishes.
  CHECK(std::fabs(ex::gamblers_ruin_prob(0.6, 2, 5000) - 5.0 / 9.0) <= 1e-14);
  CHECK(ex::gamblers_ruin_prob(0.4, 2, 5000) >= 0.0);
  CHECK(ex::gamblers_ruin_prob(0.4, 2, 5000) <= 1e-300);
}

TEST_CASE("ruin probability satisfies the first-step recursion") {
  const double p = 0.37;
  const long top = 7;
  for (long v = 1; v < top; ++v) {
    const double here = ex::gamblers_ruin_prob(p, v, top - v);
    const double up = (v + 1 == top) ? 1.0 : ex::gamblers_ruin_prob(p, v + 1, top - v - 1);
    const double down = (v == 1) ? 0.0 : ex::gamblers_ruin_prob(p, v - 1, top - v + 1);
    CHECK(std::fabs(here - (p * up + (1.0 - p) * down)) <= 5e-15);
  }
}

TEST_CASE("ruin probability guards") {
  CHECK_THROWS_AS(ex::gamblers_ruin_prob(0.0, 1, 1), std::domain_error);
  CHECK_THROWS_AS(ex::gamblers_ruin_prob(1.0, 1, 1), std::domain_error);
  CHECK_THROWS_AS(ex::gamblers_ruin_prob(0.5, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(ex::gamblers_ruin_prob(0.5, 1, -1), std::invalid_argument);
}

TEST_CASE("ruin of the embedded walk reproduces the tail closed form") {
  for (double lam : {0.3, 0.5, 0.9}) {
    const auto ti = TrafficIntensity::from_lambda(lam);
    const double p = lam / (1.0 + lam);
    for (long l = 0; l <= 50; ++l) {
      const double want = ex::tail_probability(ti, l);
      CHECK(std::fabs(ex::gamblers_ruin_prob(p, 1, l) - want) <= 1e-12 * want);
    }
  }
}

TEST_CASE("backward difference matches big-integer arithmetic") {
  using qmax::BigInt;
  for (int k = 1; k <= 12; ++k) {
    for (long long m : {1LL, 2LL, 3LL, 10LL, 999LL}) {
      BigInt mk, m1k;
      mpz_ui_pow_ui(mk.get_mpz_t(), static_cast<unsigned long>(m),
                    static_cast<unsigned long>(k));
      mpz_ui_pow_ui(m1k.get_mpz_t(), static_cast<unsigned long>(m - 1),
                    static_cast<unsigned long>(k));
      const BigInt want = mk - m1k;
      if (want.fits_slong_p()) {
        CHECK(ex::backward_difference(k, m) == want.get_si());
      } else {
        CHECK_THROWS_AS(ex::backward_difference(k, m), std::overflow_error);
      }
    }
  }
  CHECK(ex::backward_difference(1, 12345) == 1);
  CHECK_THROWS_AS(ex::backward_difference(0, 3), std::invalid_argument);
  CHECK_THROWS_AS(ex::backward_difference(2, 0), std::invalid_argument);
  CHECK_THROWS_AS(ex::backward_difference(7, 1000000), std::overflow_error);
}

TEST_CASE("divisor-power sieve matches trial division") {
  for (int k = 0; k <= 3; ++k) {
    const auto sieve = ex::sigma_sieve(k, 300);
    REQUIRE(sieve.size() == 301);
    for (long n = 1; n <= 300; ++n) {
      std::uint64_t want = 0;
      for (long d = 1; d <= n; ++d) {
        if (n % d != 0) continue;
        std::uint64_t dk = 1;
        for (int i = 0; i < k; ++i) dk *= static_cast<std::uint64_t>(d);
        want += dk;
      }
      CHECK(sieve[static_cast<std::size_t>(n)] == want);
    }
  }
  CHECK(ex::sigma_sieve(0, 12)[12] == 6);
  CHECK(ex::sigma_sieve(1, 12)[12] == 28);
  CHECK_THROWS_AS(ex::sigma_sieve(9, 100000000), std::domain_error);
  CHECK_THROWS_AS(ex::sigma_sieve(-1, 10), std::invalid_argument);
}

TEST_CASE("the two Lambert-sum routes agree") {
  for (int k = 0; k <= 4; ++k) {
    for (double lam : {0.1, 0.5, 0.9}) {
      const auto ti = TrafficIntensity::from_lambda(lam);
      const double a = ex::lambert_s_direct(k, ti);
      const double b = ex::lambert_s_divisor(k, ti);
      CHECK(std::fabs(a - b) <= 1e-10 * std::fabs(a));
    }
  }
}

TEST_CASE("S_0 at lambda = 1/2 is the sum of reciprocals of 2^m - 1") {
  // sum_m (1/2)^m / (1 - (1/2)^m) = sum_m 1/(2^m - 1) = 1.6066951524152917638...
  const auto ti = TrafficIntensity::from_lambda(0.5);
  const Tolerance tight(1e-14);
  CHECK(std::fabs(ex::lambert_s_direct(0, ti, tight) - 1.6066951524152917638) <= 5e-13);
  // And Ex[L] at lambda = 1/2 equals the same constant, since the
  // prefactor (1-lambda)/lambda is 1 there.
  CHECK(std::fabs(ex::moment(1, ti, tight) - 1.6066951524152917638) <= 5e-13);
}

TEST_CASE("Lambert sums diverge at the critical point") {
  const auto crit = TrafficIntensity::from_u(0.0);
  CHECK_THROWS_AS(ex::lambert_s_direct(0, crit), std::domain_error);
  CHECK_THROWS_AS(ex::lambert_s_divisor(1, crit), std::domain_error);
  CHECK_THROWS_AS(ex::moment(1, crit), std::domain_error);
  CHECK_THROWS_AS(ex::equilibrium_mean(crit), std::domain_error);
}

TEST_CASE("moments agree with direct summation over the distribution") {
  for (int k = 1; k <= 4; ++k) {
    for (double lam : {0.5, 0.9, 0.95}) {
      const auto ti = TrafficIntensity::from_lambda(lam);
      const double a = ex::moment(k, ti);
      const double b = ex::brute_force_moment(k, ti, 4000);
      CHECK(std::fabs(a - b) <= 1e-9 * std::fabs(a));
    }
  }
}

TEST_CASE("moments agree with tail-sum identities") {
  // Ex[L] = sum_l Pr[L > l]; Ex[L^2] = sum_l (2l+1) Pr[L > l].
  const auto ti = TrafficIntensity::from_lambda(0.9);
  long double m1 = 0.0L, m2 = 0.0L;
  for (long l = 3000; l >= 0; --l) {
    const long double t = ex::tail_probability(ti, l);
    m1 += t;
    m2 += (2.0L * static_cast<long double>(l) + 1.0L) * t;
  }
  CHECK(std::fabs(ex::moment(1, ti) - static_cast<double>(m1)) <=
        1e-12 * static_cast<double>(m1));
  CHECK(std::fabs(ex::moment(2, ti) - static_cast<double>(m2)) <=
        1e-12 * static_cast<double>(m2));
}

TEST_CASE("moment input guards") {
  const auto ti = TrafficIntensity::from_lambda(0.9);
  CHECK_THROWS_AS(ex::moment(0, ti), std::invalid_argument);
  CHECK_THROWS_AS(ex::brute_force_moment(1, ti, 0), std::invalid_argument);
  CHECK_THROWS_AS(ex::brute_force_moment(1, ti, 5), qmax::ConvergenceError);
}

TEST_CASE("loose tolerances still give loosely correct sums") {
  const auto ti = TrafficIntensity::from_lambda(0.9);
  const double tight = ex::lambert_s_direct(1, ti);
  const double loose = ex::lambert_s_direct(1, ti, Tolerance(1e-3));
  CHECK(std::fabs(tight - loose) <= 2e-3 * std::fabs(tight));
  CHECK_THROWS_AS(Tolerance(0.0), std::invalid_argument);
  CHECK_THROWS_AS(Tolerance(1.0), std::invalid_argument);
  CHECK_THROWS_AS(Tolerance(-0.5), std::invalid_argument);
}

TEST_CASE("closed-form integrals match adaptive quadrature") {
  const auto make_integrand = [](int j, double lam) {
    return [j, lam](double x) {
      const double ax = std::exp(x * std::log(lam));
      double xj = 1.0;
      for (int i = 0; i < j; ++i) xj *= x;
      return xj * ax / (1.0 - ax);
    };
  };
  const std::vector<std::tuple<int, double, double>> cases = {
      {0, 1.0 - std::exp(-1.0), 1e-12},
      {1, 0.5, 1e-8},
      {2, 0.9, 1e-8},
  };
  for (const auto& [j, lam, tol] : cases) {
    const auto ti = TrafficIntensity::from_lambda(lam);
    const double closed = ex::integral_I(j, ti);
    const double cut = 40.0 / ti.h();  // remaining tail is ~e^-40 / h
    const double quad =
        integrate(make_integrand(j, lam), 1.0, cut, 0.05 * tol * std::fabs(closed));
    CHECK(std::fabs(closed - quad) <= tol * std::fabs(closed));
  }
}

TEST_CASE("sums are bracketed by their integrals") {
  // |S_0 - I_0| <= lambda/(1-lambda) and |S_j - I_j| <= 2 j!/h^j: the
  // summands are unimodal, so sum and integral differ by at most the peak.
  for (double lam : {0.1, 0.25, 0.5, 0.75, 0.9, 0.95}) {
    const auto ti = TrafficIntensity::from_lambda(lam);
    CHECK(std::fabs(ex::lambert_s_direct(0, ti) - ex::integral_I(0, ti)) <=
          lam / (1.0 - lam) + 1e-12);
    double jfact = 1.0;
    for (int j = 1; j <= 4; ++j) {
      jfact *= j;
      const double cap = 2.0 * jfact / std::pow(ti.h(), j);
      CHECK(std::fabs(ex::lambert_s_direct(j, ti) - ex::integral_I(j, ti)) <=
            cap * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("q-digamma identity recovers S_0") {
  for (double lam : {0.5, 0.9}) {
    const auto ti = TrafficIntensity::from_lambda(lam);
    const double s0 = ex::lambert_s_direct(0, ti);
    const double psi = ex::q_digamma(lam, 1.0);
    const double via = (psi + std::log1p(-lam)) / std::log(lam);
    CHECK(std::fabs(via - s0) <= 1e-9 * std::fabs(s0));
  }
}

TEST_CASE("q-digamma small-q behavior and guards") {
  CHECK(std::fabs(ex::q_digamma(1e-8, 1.0)) <= 1e-6);
  CHECK_THROWS_AS(ex::q_digamma(0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(ex::q_digamma(1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(ex::q_digamma(0.5, 0.0), std::domain_error);
}

TEST_CASE("equilibrium mean is lambda over 1 - lambda") {
  CHECK(ex::equilibrium_mean(TrafficIntensity::from_lambda(0.5)) == 1.0);
  const auto ti = TrafficIntensity::from_u(0.125);
  CHECK(std::fabs(ex::equilibrium_mean(ti) - 7.0) <= 1e-15 * 7.0);
}

TEST_CASE("intensity construction and guards") {
  CHECK_THROWS_AS(TrafficIntensity::from_lambda(1.5), std::domain_error);
  CHECK_THROWS_AS(TrafficIntensity::from_lambda(0.0), std::domain_error);
  CHECK_THROWS_AS(TrafficIntensity::from_lambda(-0.2), std::domain_error);
  CHECK_THROWS_AS(TrafficIntensity::from_u(1.0), std::domain_error);
  CHECK_THROWS_AS(TrafficIntensity::from_u(-0.1), std::domain_error);
  CHECK(TrafficIntensity::from_u(0.0).is_critical());
  CHECK(TrafficIntensity::from_lambda(1.0).is_critical());

  const auto tiny = TrafficIntensity::from_u(1e-12);
  CHECK(tiny.u() == 1e-12);  // no cancellation through 1 - lambda
  const double ratio = tiny.h() / tiny.u();
  CHECK(ratio > 1.0);
  CHECK(ratio < 1.0 + 1e-9);
}
