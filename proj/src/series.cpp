#include <qmax/series.hpp>

#include <qmax/special.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace qmax::series {

namespace {

bool nearly_zero(double x) { return x == 0.0; }

std::string format_sig6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

}  // namespace

LogPoly LogPoly::constant(double c) {
  LogPoly p;
  p.c_[0] = c;
  return p;
}

LogPoly LogPoly::log_term(double c) {
  LogPoly p;
  p.c_[1] = c;
  return p;
}

LogPoly LogPoly::log_squared(double c) {
  LogPoly p;
  p.c_[2] = c;
  return p;
}

int LogPoly::degree() const {
  for (int d = 2; d >= 0; --d)
    if (!nearly_zero(c_[static_cast<std::size_t>(d)])) return d;
  return -1;
}

LogPoly& LogPoly::operator+=(const LogPoly& o) {
  for (std::size_t i = 0; i < 3; ++i) c_[i] += o.c_[i];
  return *this;
}

LogPoly LogPoly::operator*(const LogPoly& o) const {
  LogPoly out;
  for (int i = 0; i < 3; ++i) {
    if (nearly_zero(c_[static_cast<std::size_t>(i)])) continue;
    for (int j = 0; j < 3; ++j) {
      if (nearly_zero(o.c_[static_cast<std::size_t>(j)])) continue;
      if (i + j > 2)
        throw std::domain_error(
            "LogPoly: product exceeds the degree-2 cap in log(1/(1-lambda))");
      out.c_[static_cast<std::size_t>(i + j)] +=
          c_[static_cast<std::size_t>(i)] * o.c_[static_cast<std::size_t>(j)];
    }
  }
  return out;
}

LogPoly LogPoly::scaled(double s) const {
  LogPoly out = *this;
  for (auto& c : out.c_) c *= s;
  return out;
}

double LogPoly::eval(double log_value) const {
  return c_[0] + log_value * (c_[1] + log_value * c_[2]);
}

LogLaurentSeries::LogLaurentSeries(int n_min, int order) : n_min_(n_min), order_(order) {
  if (n_min > order)
    throw std::invalid_argument("LogLaurentSeries: n_min must not exceed order");
}

LogLaurentSeries LogLaurentSeries::constant(double c, int order) {
  LogLaurentSeries s(0, order);
  s.add_term(0, LogPoly::constant(c));
  return s;
}

LogPoly LogLaurentSeries::coeff(int n) const {
  auto it = terms_.find(n);
  return it == terms_.end() ? LogPoly() : it->second;
}

void LogLaurentSeries::add_term(int n, const LogPoly& p) {
  if (n >= order_) return;  // beyond the truncation horizon
  if (p.is_zero()) {
    if (n < n_min_) n_min_ = n;
    return;
  }
  terms_[n] += p;
  if (n < n_min_) n_min_ = n;
  if (terms_[n].is_zero()) terms_.erase(n);
}

LogLaurentSeries LogLaurentSeries::scaled(double s) const {
  LogLaurentSeries out(n_min_, order_);
  if (s == 0.0) return out;
  for (const auto& [n, p] : terms_) out.terms_[n] = p.scaled(s);
  return out;
}

LogLaurentSeries LogLaurentSeries::truncated(int new_order) const {
  const int ord = std::min(order_, new_order);
  LogLaurentSeries out(std::min(n_min_, ord), ord);
  for (const auto& [n, p] : terms_)
    if (n < ord) out.terms_[n] = p;
  return out;
}

LogLaurentSeries series_add(const LogLaurentSeries& a, const LogLaurentSeries& b) {
  const int order = std::min(a.order(), b.order());
  LogLaurentSeries out(std::min({a.n_min(), b.n_min(), order}), order);
  for (const auto& [n, p] : a.terms()) out.add_term(n, p);
  for (const auto& [n, p] : b.terms()) out.add_term(n, p);
  return out;
}

LogLaurentSeries series_mul(const LogLaurentSeries& a, const LogLaurentSeries& b) {
  // An unknown term u^order in one factor meets the lowest power of the
  // other, so knowledge stops at min(a.n_min + b.order, b.n_min + a.order).
  const int order = std::min(a.n_min() + b.order(), b.n_min() + a.order());
  const int n_min = std::min(a.n_min() + b.n_min(), order);
  LogLaurentSeries out(n_min, order);
  for (const auto& [na, pa] : a.terms())
    for (const auto& [nb, pb] : b.terms()) {
      if (na + nb >= order) continue;
      out.add_term(na + nb, pa * pb);
    }
  return out;
}

LogLaurentSeries inv_h_series(int order) {
  if (order < 0) throw std::invalid_argument("inv_h_series: order must be >= 0");
  LogLaurentSeries out(-1, order);
  for (int n = 0; n - 1 < order && n <= special::kMaxExactIndex; ++n) {
    Rational c = special::cauchy_number(n) / Rational::factorial(static_cast<unsigned long>(n));
    if (n % 2 != 0) c = -c;
    out.add_term(n - 1, LogPoly::constant(c.to_double()));
  }
  if (order - 1 > special::kMaxExactIndex)
    throw std::domain_error("inv_h_series: order exceeds the exact coefficient cache");
  return out;
}

LogLaurentSeries inv_h_power(int power, int order) {
  if (power < 1) throw std::invalid_argument("inv_h_power: power must be >= 1");
  LogLaurentSeries out = inv_h_series(order + power - 1);
  for (int i = 1; i < power; ++i) out = series_mul(out, inv_h_series(order + power - 1));
  return out.truncated(order);
}

LogLaurentSeries h_series(int order) {
  LogLaurentSeries out(1, order);
  for (int n = 1; n < order; ++n)
    out.add_term(n, LogPoly::constant(1.0 / n));
  return out;
}

LogLaurentSeries h_power(int power, int order) {
  if (power < 1) throw std::invalid_argument("h_power: power must be >= 1");
  LogLaurentSeries out = h_series(order);
  for (int i = 1; i < power; ++i) out = series_mul(out, h_series(order));
  return out.truncated(order);
}

LogLaurentSeries prefactor_series(int order) {
  LogLaurentSeries out(1, order);
  for (int n = 1; n < order; ++n) out.add_term(n, LogPoly::constant(1.0));
  return out;
}

double evaluate(const LogLaurentSeries& s, const TrafficIntensity& ti) {
  ti.require_subcritical("series evaluation");
  const double u = ti.u();
  const double big_l = ti.log_term();
  long double acc = 0.0L;
  for (const auto& [n, p] : s.terms())
    acc += static_cast<long double>(p.eval(big_l)) *
           powl(static_cast<long double>(u), static_cast<long double>(n));
  return static_cast<double>(acc);
}

nlohmann::json to_json(const LogLaurentSeries& s) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [n, p] : s.terms()) {
    terms.push_back({{"power", n}, {"log_coeffs", {p[0], p[1], p[2]}}});
  }
  return {{"n_min", s.n_min()}, {"order", s.order()}, {"terms", terms}};
}

LogLaurentSeries series_from_json(const nlohmann::json& j) {
  LogLaurentSeries out(j.at("n_min").get<int>(), j.at("order").get<int>());
  for (const auto& t : j.at("terms")) {
    const auto& c = t.at("log_coeffs");
    if (c.size() != 3)
      throw std::invalid_argument("series_from_json: log_coeffs must have 3 entries");
    LogPoly p;
    p += LogPoly::constant(c[0].get<double>());
    p += LogPoly::log_term(c[1].get<double>());
    p += LogPoly::log_squared(c[2].get<double>());
    out.add_term(t.at("power").get<int>(), p);
  }
  return out;
}

std::string to_text(const LogLaurentSeries& s) {
  std::ostringstream os;
  os << "series in u = 1-lambda, powers " << s.n_min() << " <= n < " << s.order() << "\n";
  if (s.terms().empty()) {
    os << "  (zero)\n";
    return os.str();
  }
  for (const auto& [n, p] : s.terms()) {
    os << "  u^" << n << "  ";
    bool first = true;
    static const char* names[3] = {"", "log(1/(1-lambda))", "log(1/(1-lambda))^2"};
    for (int d = 0; d < 3; ++d) {
      if (p[d] == 0.0) continue;
      if (!first) os << " + ";
      os << format_sig6(p[d]);
      if (d > 0) os << "*" << names[d];
      first = false;
    }
    if (first) os << "0";
    os << "\n";
  }
  return os.str();
}

double evaluate_at_h(const HExpansion& t, double h) {
  if (!(h > 0.0)) throw std::domain_error("evaluate_at_h: requires h > 0");
  long double acc = 0.0L;
  for (const auto& [p, c] : t.coeffs)
    acc += static_cast<long double>(c.to_double()) * powl(h, static_cast<long double>(p));
  if (t.has_zeta)
    acc += static_cast<long double>(t.zeta_coeff.to_double()) *
           special::riemann_zeta(t.zeta_index) * powl(h, static_cast<long double>(t.zeta_power));
  if (t.has_gamma)
    acc += static_cast<long double>(t.gamma_coeff.to_double()) * special::euler_gamma() *
           powl(h, static_cast<long double>(t.gamma_power));
  if (t.has_log_over_h) {
    // u = 1 - lambda = 1 - e^-h
    const double u = -std::expm1(-h);
    acc += static_cast<long double>(t.log_over_h_coeff.to_double()) * (-std::log(u)) / h;
  }
  return static_cast<double>(acc);
}

HExpansion truncated_h(const HExpansion& t, int keep_below) {
  HExpansion out;
  out.order = std::min(t.order, keep_below);
  out.n_min = std::min(t.n_min, out.order);
  for (const auto& [p, c] : t.coeffs)
    if (p < keep_below) out.coeffs.emplace(p, c);
  if (t.has_zeta && t.zeta_power < keep_below) {
    out.has_zeta = true;
    out.zeta_index = t.zeta_index;
    out.zeta_power = t.zeta_power;
    out.zeta_coeff = t.zeta_coeff;
  }
  if (t.has_gamma && t.gamma_power < keep_below) {
    out.has_gamma = true;
    out.gamma_power = t.gamma_power;
    out.gamma_coeff = t.gamma_coeff;
  }
  if (t.has_log_over_h && -1 < keep_below) {
    out.has_log_over_h = true;
    out.log_over_h_coeff = t.log_over_h_coeff;
  }
  return out;
}

nlohmann::json to_json(const HExpansion& t) {
  // Same shape as the u-series schema, with powers of h and the numeric
  // fold of the symbolic constants; the log(1/(1-lambda))/h term lands in
  // the degree-1 slot of the h^-1 entry.
  std::map<int, std::array<double, 2>> folded;
  for (const auto& [p, c] : t.coeffs) folded[p][0] += c.to_double();
  if (t.has_zeta)
    folded[t.zeta_power][0] += t.zeta_coeff.to_double() * special::riemann_zeta(t.zeta_index);
  if (t.has_gamma) folded[t.gamma_power][0] += t.gamma_coeff.to_double() * special::euler_gamma();
  if (t.has_log_over_h) folded[-1][1] += t.log_over_h_coeff.to_double();

  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [p, c] : folded)
    terms.push_back({{"power", p}, {"log_coeffs", {c[0], c[1], 0.0}}});
  return {{"variable", "h"}, {"n_min", t.n_min}, {"order", t.order}, {"terms", terms}};
}

std::string to_text(const HExpansion& t) {
  struct Line {
    int power;
    int rank;  // orders terms of equal power: zeta, log, gamma, rational
    std::string text;
  };
  std::vector<Line> lines;
  if (t.has_zeta)
    lines.push_back({t.zeta_power, 0,
                     t.zeta_coeff == Rational(1)
                         ? "zeta(" + std::to_string(t.zeta_index) + ")"
                         : t.zeta_coeff.str() + " * zeta(" + std::to_string(t.zeta_index) + ")"});
  if (t.has_log_over_h)
    lines.push_back({-1, 1,
                     t.log_over_h_coeff == Rational(1)
                         ? "log(1/(1-lambda))"
                         : t.log_over_h_coeff.str() + " * log(1/(1-lambda))"});
  if (t.has_gamma)
    lines.push_back({t.gamma_power, 2,
                     t.gamma_coeff == Rational(1) ? "gamma" : t.gamma_coeff.str() + " * gamma"});
  for (const auto& [p, c] : t.coeffs) lines.push_back({p, 3, c.str()});
  std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
    return a.power != b.power ? a.power < b.power : a.rank < b.rank;
  });

  std::ostringstream os;
  os << "expansion in h = -log(lambda), powers " << t.n_min << " <= n < " << t.order << "\n";
  for (const auto& ln : lines) {
    os << "  h^" << ln.power << "  " << ln.text << "\n";
  }
  return os.str();
}

}  // namespace qmax::series
