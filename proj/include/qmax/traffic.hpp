#ifndef QMAX_TRAFFIC_HPP
#define QMAX_TRAFFIC_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace qmax {

/// Ratio of arrival rate to service rate, restricted to 0 < lambda <= 1.
///
/// Both lambda and u = 1 - lambda are stored as given, so a value supplied
/// as u close to 0 (lambda near 1) keeps its full precision instead of
/// being squeezed through the cancellation in 1 - lambda.
class TrafficIntensity {
 public:
  static TrafficIntensity from_lambda(double lambda) {
    if (!std::isfinite(lambda) || !(lambda > 0.0))
      throw std::domain_error("traffic intensity requires lambda > 0");
    if (lambda > 1.0)
      throw std::domain_error(
          "traffic intensity above 1: the busy period is infinite with "
          "positive probability, so the maximum has no distribution");
    return TrafficIntensity(lambda, 1.0 - lambda);
  }

  /// u = 1 - lambda, the preferred parameter near the critical point.
  static TrafficIntensity from_u(double u) {
    if (!std::isfinite(u) || !(u >= 0.0) || !(u < 1.0))
      throw std::domain_error("requires 0 <= u = 1 - lambda < 1");
    return TrafficIntensity(1.0 - u, u);
  }

  double lambda() const { return lambda_; }
  double u() const { return u_; }

  /// lambda == 1 exactly (the critical queue).
  bool is_critical() const { return u_ == 0.0; }

  /// h = -log(lambda) = log(1/lambda), positive below the critical point.
  double h() const {
    require_subcritical("h = -log(lambda)");
    return u_ < 0.5 ? -std::log1p(-u_) : -std::log(lambda_);
  }

  /// log(1/(1 - lambda)) = log(1/u), the slowly growing factor in the
  /// near-critical moment formulas.
  double log_term() const {
    require_subcritical("log(1/(1-lambda))");
    return -std::log(u_);
  }

  void require_subcritical(const char* what) const {
    if (is_critical())
      throw std::domain_error(std::string(what) + " requires lambda < 1");
  }

 private:
  TrafficIntensity(double lambda, double u) : lambda_(lambda), u_(u) {}
  double lambda_;
  double u_;
};

/// Relative-accuracy target for infinite-sum truncation.
struct Tolerance {
  double rel_tol = 1e-12;

  Tolerance() = default;
  explicit Tolerance(double r) : rel_tol(r) {
    if (!(r > 0.0) || !(r < 1.0))
      throw std::invalid_argument("rel_tol must lie strictly between 0 and 1");
  }
};

}  // namespace qmax

#endif  // QMAX_TRAFFIC_HPP
