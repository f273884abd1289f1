#ifndef QMAX_SERIES_HPP
#define QMAX_SERIES_HPP

#include <qmax/rational.hpp>
#include <qmax/traffic.hpp>

#include <json.hpp>

#include <array>
#include <map>
#include <string>

namespace qmax::series {

/// Polynomial in L = log(1/(1-lambda)) of degree at most 2. Everything the
/// moment expansions need stays within degree 2 (degree 1 from the mean,
/// degree 2 from its square inside the variance); exceeding the cap is a
/// logic error, not a representable object.
class LogPoly {
 public:
  LogPoly() = default;

  static LogPoly constant(double c);
  static LogPoly log_term(double c);     // c * L
  static LogPoly log_squared(double c);  // c * L^2

  /// Degree of the polynomial; -1 for the zero polynomial.
  int degree() const;
  bool is_zero() const { return degree() < 0; }

  /// Coefficient of L^d (0 outside the stored range).
  double operator[](int d) const {
    return (d >= 0 && d < 3) ? c_[static_cast<std::size_t>(d)] : 0.0;
  }

  LogPoly& operator+=(const LogPoly& o);
  LogPoly operator*(const LogPoly& o) const;
  LogPoly scaled(double s) const;

  double eval(double log_value) const;

 private:
  std::array<double, 3> c_{0.0, 0.0, 0.0};
};

/// Truncated Laurent series in u = 1 - lambda whose coefficients are
/// LogPoly values. Powers n with n_min <= n < order are significant and
/// stored sparsely (absent means exactly zero); powers >= order are unknown.
/// Arithmetic never pretends to know more than its inputs: the order of a
/// sum is the min of the orders, the order of a product is
/// min(a.n_min + b.order, b.n_min + a.order).
class LogLaurentSeries {
 public:
  LogLaurentSeries(int n_min, int order);

  static LogLaurentSeries zero(int order) { return {order, order}; }
  static LogLaurentSeries constant(double c, int order);

  int n_min() const { return n_min_; }
  int order() const { return order_; }

  LogPoly coeff(int n) const;

  /// Adds p into the coefficient of u^n. Terms at or above the truncation
  /// order are discarded; n below n_min extends the stored range.
  void add_term(int n, const LogPoly& p);

  LogLaurentSeries scaled(double s) const;

  /// Tightens the truncation order (never loosens it).
  LogLaurentSeries truncated(int new_order) const;

  const std::map<int, LogPoly>& terms() const { return terms_; }

 private:
  int n_min_;
  int order_;
  std::map<int, LogPoly> terms_;
};

LogLaurentSeries series_add(const LogLaurentSeries& a, const LogLaurentSeries& b);
LogLaurentSeries series_mul(const LogLaurentSeries& a, const LogLaurentSeries& b);

/// 1/h = 1/(-log(1-u)) as a Laurent series u^-1 - 1/2 - u/12 - ...,
/// truncated at the given order. Coefficients come from the exact Cauchy
/// numbers: 1/h = (1/u) sum_n (-1)^n C_n u^n / n!.
LogLaurentSeries inv_h_series(int order);

/// (1/h)^power for power >= 1.
LogLaurentSeries inv_h_power(int power, int order);

/// h = -log(1-u) = sum_{n>=1} u^n / n, truncated.
LogLaurentSeries h_series(int order);

/// h^power for power >= 1.
LogLaurentSeries h_power(int power, int order);

/// (1-lambda)/lambda = u/(1-u) = sum_{n>=1} u^n, truncated.
LogLaurentSeries prefactor_series(int order);

/// Numeric value of the truncated series at a subcritical intensity.
double evaluate(const LogLaurentSeries& s, const TrafficIntensity& ti);

nlohmann::json to_json(const LogLaurentSeries& s);
LogLaurentSeries series_from_json(const nlohmann::json& j);

/// Human-readable rendering, lowest power first, 6 significant digits.
std::string to_text(const LogLaurentSeries& s);

/// Expansion in powers of h = -log(lambda) with exact rational coefficients
/// plus up to three symbolic terms that stay exact until evaluation:
/// a zeta(m) h^p term, a gamma h^p term, and the log(1/(1-lambda))/h term.
/// Powers n_min <= n < order are significant; the log-over-h term implies
/// n_min <= -1.
struct HExpansion {
  int n_min = 0;
  int order = 0;
  std::map<int, Rational> coeffs;

  bool has_zeta = false;
  int zeta_index = 0;
  int zeta_power = 0;
  Rational zeta_coeff;

  bool has_gamma = false;
  int gamma_power = 0;
  Rational gamma_coeff;

  bool has_log_over_h = false;
  Rational log_over_h_coeff;
};

/// Numeric value at h > 0 (u is recovered as 1 - e^-h for the log term).
double evaluate_at_h(const HExpansion& t, double h);

/// Keeps only terms with power < keep_below; symbolic terms follow the same
/// rule. Used for empirical order-of-accuracy checks.
HExpansion truncated_h(const HExpansion& t, int keep_below);

nlohmann::json to_json(const HExpansion& t);

/// Exact rendering: rationals as fractions, symbolic terms by name.
std::string to_text(const HExpansion& t);

}  // namespace qmax::series

#endif  // QMAX_SERIES_HPP
