#ifndef QMAX_ERRORS_HPP
#define QMAX_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qmax {

/// A truncated sum or iteration failed to reach the requested accuracy.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// A simulated busy period was abandoned after step_cap transitions.
/// Carries the largest queue length seen before the cap so callers can
/// report partial information.
class StepCapExceeded : public std::runtime_error {
 public:
  StepCapExceeded(const std::string& what, long partial_max)
      : std::runtime_error(what), partial_max_(partial_max) {}

  long partial_max() const { return partial_max_; }

  bool has_replicate() const { return replicate_known_; }
  std::uint64_t replicate() const { return replicate_; }
  void set_replicate(std::uint64_t r) {
    replicate_ = r;
    replicate_known_ = true;
  }

 private:
  long partial_max_;
  std::uint64_t replicate_ = 0;
  bool replicate_known_ = false;
};

}  // namespace qmax

#endif  // QMAX_ERRORS_HPP
