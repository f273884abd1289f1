#ifndef QMAX_RATIONAL_HPP
#define QMAX_RATIONAL_HPP

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <utility>

namespace qmax {

using BigInt = mpz_class;

/// Exact fraction with arbitrary-precision numerator and denominator.
/// Invariant: denominator > 0 and gcd(numerator, denominator) == 1 after
/// every operation.
class Rational {
 public:
  Rational() : q_(0) {}
  Rational(long value) : q_(value) {}  // NOLINT(google-explicit-constructor)
  explicit Rational(const BigInt& value) : q_(value) {}
  Rational(const BigInt& num, const BigInt& den) : q_(num, den) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    q_.canonicalize();
  }
  Rational(long num, long den) : Rational(BigInt(num), BigInt(den)) {}

  const mpz_class& numerator() const { return q_.get_num(); }
  const mpz_class& denominator() const { return q_.get_den(); }

  bool is_zero() const { return q_ == 0; }
  bool is_integer() const { return q_.get_den() == 1; }
  int sign() const { return sgn(q_); }

  double to_double() const { return q_.get_d(); }

  /// "p/q", or just "p" when the denominator is 1.
  std::string str() const {
    if (is_integer()) return q_.get_num().get_str();
    return q_.get_num().get_str() + "/" + q_.get_den().get_str();
  }

  Rational& operator+=(const Rational& o) {
    q_ += o.q_;
    return *this;
  }
  Rational& operator-=(const Rational& o) {
    q_ -= o.q_;
    return *this;
  }
  Rational& operator*=(const Rational& o) {
    q_ *= o.q_;
    return *this;
  }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw std::invalid_argument("Rational: division by zero");
    q_ /= o.q_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) {
    Rational r;
    r.q_ = -a.q_;
    return r;
  }

  friend bool operator==(const Rational& a, const Rational& b) { return a.q_ == b.q_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.q_ != b.q_; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.q_ < b.q_; }
  friend bool operator<=(const Rational& a, const Rational& b) { return a.q_ <= b.q_; }
  friend bool operator>(const Rational& a, const Rational& b) { return a.q_ > b.q_; }
  friend bool operator>=(const Rational& a, const Rational& b) { return a.q_ >= b.q_; }

  static Rational binomial(unsigned long n, unsigned long k) {
    BigInt b;
    mpz_bin_uiui(b.get_mpz_t(), n, k);
    return Rational(b);
  }

  static Rational factorial(unsigned long n) {
    BigInt f;
    mpz_fac_ui(f.get_mpz_t(), n);
    return Rational(f);
  }

  static Rational pow(const Rational& base, unsigned long e) {
    Rational r = 1;
    for (unsigned long i = 0; i < e; ++i) r *= base;
    return r;
  }

 private:
  mpq_class q_;
};

}  // namespace qmax

#endif  // QMAX_RATIONAL_HPP
