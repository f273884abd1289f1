#include <qmax/asymptotic.hpp>

#include <qmax/special.hpp>

#include <cmath>
#include <stdexcept>

namespace qmax::asymptotic {

using series::HExpansion;
using series::LogLaurentSeries;
using series::LogPoly;

double IntegralConstant::to_double() const {
  switch (kind) {
    case Kind::rational:
      return coeff.to_double();
    case Kind::factorial_zeta:
      return coeff.to_double() * special::riemann_zeta(zeta_index);
    case Kind::euler_gamma:
      return coeff.to_double() * special::euler_gamma();
  }
  throw std::logic_error("IntegralConstant: unknown kind");
}

TaylorCoeffs taylor_coeffs_f_j(int j, int n_terms) {
  if (j < 1) throw std::invalid_argument("taylor_coeffs_f_j: requires j >= 1");
  if (n_terms < 0) throw std::invalid_argument("taylor_coeffs_f_j: requires n_terms >= 0");
  TaylorCoeffs out;
  out.coeffs.resize(static_cast<std::size_t>(n_terms));
  for (int m = 0; m < n_terms; ++m) {
    const int i = m - j + 1;  // index into the exponential series
    if (i < 0) continue;
    out.coeffs[static_cast<std::size_t>(m)] =
        special::bernoulli_number(i) / Rational::factorial(static_cast<unsigned long>(i));
  }
  out.integral.kind = IntegralConstant::Kind::factorial_zeta;
  out.integral.coeff = Rational::factorial(static_cast<unsigned long>(j));
  out.integral.zeta_index = j + 1;
  return out;
}

TaylorCoeffs taylor_coeffs_f_star(int n_terms) {
  if (n_terms < 0) throw std::invalid_argument("taylor_coeffs_f_star: requires n_terms >= 0");
  TaylorCoeffs out;
  out.coeffs.resize(static_cast<std::size_t>(n_terms));
  for (int n = 0; n < n_terms; ++n) {
    Rational sign = (n + 1) % 2 == 0 ? Rational(1) : Rational(-1);  // (-1)^(n+1)
    out.coeffs[static_cast<std::size_t>(n)] =
        (special::bernoulli_number(n + 1) - sign) /
        Rational::factorial(static_cast<unsigned long>(n) + 1);
  }
  out.integral.kind = IntegralConstant::Kind::euler_gamma;
  out.integral.coeff = 1;
  return out;
}

ExpansionTermTable zagier_expansion(const TaylorCoeffs& f, int order) {
  if (order < 0) throw std::invalid_argument("zagier_expansion: requires order >= 0");
  if (static_cast<int>(f.coeffs.size()) < order)
    throw std::invalid_argument("zagier_expansion: not enough Taylor coefficients for the order");
  HExpansion t;
  t.n_min = -1;
  t.order = order;
  switch (f.integral.kind) {
    case IntegralConstant::Kind::rational:
      if (!f.integral.coeff.is_zero()) t.coeffs[-1] = f.integral.coeff;
      break;
    case IntegralConstant::Kind::factorial_zeta:
      t.has_zeta = true;
      t.zeta_index = f.integral.zeta_index;
      t.zeta_power = -1;
      t.zeta_coeff = f.integral.coeff;
      break;
    case IntegralConstant::Kind::euler_gamma:
      t.has_gamma = true;
      t.gamma_power = -1;
      t.gamma_coeff = f.integral.coeff;
      break;
  }
  for (int n = 0; n < order; ++n) {
    Rational c = f.coeffs[static_cast<std::size_t>(n)] * special::bernoulli_number(n + 1) /
                 Rational(n + 1);
    if (n % 2 != 0) c = -c;
    if (!c.is_zero()) t.coeffs[n] = c;
  }
  return t;
}

namespace {

HExpansion shifted(const HExpansion& t, int by) {
  HExpansion out;
  out.n_min = t.n_min + by;
  out.order = t.order + by;
  for (const auto& [p, c] : t.coeffs) out.coeffs.emplace(p + by, c);
  out.has_zeta = t.has_zeta;
  out.zeta_index = t.zeta_index;
  out.zeta_power = t.zeta_power + by;
  out.zeta_coeff = t.zeta_coeff;
  out.has_gamma = t.has_gamma;
  out.gamma_power = t.gamma_power + by;
  out.gamma_coeff = t.gamma_coeff;
  out.has_log_over_h = t.has_log_over_h;
  out.log_over_h_coeff = t.log_over_h_coeff;
  return out;
}

}  // namespace

ExpansionTermTable s_j_h_expansion(int j, int order) {
  if (j < 1) throw std::invalid_argument("s_j_h_expansion: requires j >= 1 (use s_0_h_expansion)");
  if (order < 0) throw std::invalid_argument("s_j_h_expansion: requires order >= 0");
  // S_j(lambda) = g(h)/h^j with g built from f_j, so expand g one level
  // deeper and divide by h^j.
  const int g_order = order + j - 1;
  const TaylorCoeffs f = taylor_coeffs_f_j(j, g_order);
  return shifted(zagier_expansion(f, g_order), -j);
}

ExpansionTermTable s_0_h_expansion(int order) {
  if (order < 0) throw std::invalid_argument("s_0_h_expansion: requires order >= 0");
  // S_0 splits into sum_m e^-mh/(mh) (the log + gamma part) and g*(h)
  // built from f*.
  HExpansion t = zagier_expansion(taylor_coeffs_f_star(order), order);
  t.has_log_over_h = true;
  t.log_over_h_coeff = 1;
  return t;
}

bool s_j_expansion_is_finite(int j) {
  if (j < 0) throw std::invalid_argument("s_j_expansion_is_finite: requires j >= 0");
  return j >= 1 && j % 2 == 1;
}

LogLaurentSeries to_u_series(const ExpansionTermTable& table, int u_order) {
  // The table is silent past h^(order-1), and an unknown h^order term
  // contributes u^order and higher, so the result cannot claim knowledge
  // past min(u_order, table.order).
  const int target = std::min(u_order, table.order);
  LogLaurentSeries acc = LogLaurentSeries::zero(target);

  auto power_series = [&](int p, int extra) {
    if (p > 0) return series::h_power(p, target + extra);
    if (p < 0) return series::inv_h_power(-p, target + extra);
    return LogLaurentSeries::constant(1.0, target + extra);
  };

  for (const auto& [p, c] : table.coeffs)
    acc = series_add(acc, power_series(p, 1).scaled(c.to_double()));
  if (table.has_zeta) {
    const double scale =
        table.zeta_coeff.to_double() * special::riemann_zeta(table.zeta_index);
    acc = series_add(acc, power_series(table.zeta_power, 1).scaled(scale));
  }
  if (table.has_gamma) {
    const double scale = table.gamma_coeff.to_double() * special::euler_gamma();
    acc = series_add(acc, power_series(table.gamma_power, 1).scaled(scale));
  }
  if (table.has_log_over_h) {
    LogLaurentSeries log_factor(0, target + 2);
    log_factor.add_term(0, LogPoly::log_term(1.0));
    LogLaurentSeries term = series_mul(series::inv_h_series(target + 2), log_factor);
    acc = series_add(acc, term.scaled(table.log_over_h_coeff.to_double()));
  }
  return acc;
}

LogLaurentSeries moment_expansion(int k, int order) {
  if (k < 1) throw std::invalid_argument("moment_expansion: requires k >= 1");
  if (order < 1) throw std::invalid_argument("moment_expansion: requires order >= 1");
  const int table_order = order + 2;
  LogLaurentSeries acc = LogLaurentSeries::zero(order + 1);
  for (int j = 0; j < k; ++j) {
    const ExpansionTermTable table =
        j == 0 ? s_0_h_expansion(table_order) : s_j_h_expansion(j, table_order + 1);
    LogLaurentSeries s = to_u_series(table, order + 1);
    double c = Rational::binomial(static_cast<unsigned long>(k),
                                  static_cast<unsigned long>(j))
                   .to_double();
    if ((k - 1 - j) % 2 != 0) c = -c;
    acc = series_add(acc, s.scaled(c));
  }
  const LogLaurentSeries pf = series::prefactor_series(order + k + 1);
  return series_mul(acc, pf).truncated(order);
}

LogLaurentSeries variance_expansion(int order) {
  if (order < 2) throw std::invalid_argument("variance_expansion: requires order >= 2");
  const LogLaurentSeries m1 = moment_expansion(1, order);
  const LogLaurentSeries m2 = moment_expansion(2, order);
  const LogLaurentSeries m1_sq = series_mul(m1, m1);
  return series_add(m2, m1_sq.scaled(-1.0)).truncated(order);
}

std::vector<AccuracyFit> order_of_accuracy_check(
    const ExpansionTermTable& table, const std::function<double(double)>& exact_of_h,
    const std::vector<double>& h_grid) {
  if (h_grid.size() < 3)
    throw std::invalid_argument("order_of_accuracy_check: need at least 3 grid points");
  for (std::size_t i = 1; i < h_grid.size(); ++i)
    if (!(h_grid[i] < h_grid[i - 1]) || !(h_grid[i] > 0.0))
      throw std::invalid_argument("order_of_accuracy_check: grid must be positive, decreasing");

  std::vector<double> exact(h_grid.size());
  for (std::size_t i = 0; i < h_grid.size(); ++i) exact[i] = exact_of_h(h_grid[i]);

  int p_first = 0;
  if (!table.coeffs.empty()) p_first = std::min(p_first, table.coeffs.begin()->first);

  std::vector<AccuracyFit> fits;
  for (int p = p_first; p <= table.order; ++p) {
    const HExpansion cut = series::truncated_h(table, p);
    std::vector<double> lx, ly;
    bool monotone = true;
    double prev = 0.0;
    for (std::size_t i = 0; i < h_grid.size(); ++i) {
      const double err = std::fabs(series::evaluate_at_h(cut, h_grid[i]) - exact[i]);
      if (i > 0 && err >= prev) monotone = false;
      prev = err;
      if (err > 0.0) {
        lx.push_back(std::log(h_grid[i]));
        ly.push_back(std::log(err));
      }
    }
    double slope = 0.0;
    if (lx.size() >= 2) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
      }
      const double n = static_cast<double>(lx.size());
      slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    fits.push_back({p, slope, monotone});
  }
  return fits;
}

}  // namespace qmax::asymptotic
