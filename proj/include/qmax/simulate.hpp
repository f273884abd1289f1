#ifndef QMAX_SIMULATE_HPP
#define QMAX_SIMULATE_HPP

#include <qmax/traffic.hpp>

#include <json.hpp>

#include <cstdint>
#include <map>

namespace qmax::simulate {

struct RngSeed {
  std::uint64_t value = 0;
};

inline constexpr std::uint64_t kDefaultStepCap = 100000000ULL;

/// splitmix64: 64 bits of state advanced by the golden-ratio increment and
/// scrambled by the finalizer. Cheap, counter-like, passes BigCrush.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

/// Independent stream for one replicate. Defined purely by (seed, index),
/// so results do not depend on how replicates are batched across calls.
SplitMix64 replicate_stream(RngSeed seed, std::uint64_t replicate);

/// Maximum queue length attained during one simulated busy period of the
/// embedded discrete chain (arrival with probability lambda/(1+lambda)).
/// Throws StepCapExceeded past step_cap transitions.
long simulate_busy_period(const TrafficIntensity& ti, SplitMix64& rng,
                          std::uint64_t step_cap = kDefaultStepCap);

/// Histogram plus power sums of simulated maxima. The power sums are exact
/// integers, so they are reproducible bit for bit and always consistent
/// with the histogram.
class EmpiricalSummary {
 public:
  EmpiricalSummary() = default;
  EmpiricalSummary(double lambda, std::uint64_t seed) : lambda_(lambda), seed_(seed) {}

  void record(long l);

  std::uint64_t n() const { return n_; }
  double lambda() const { return lambda_; }
  std::uint64_t seed() const { return seed_; }
  long max_observed() const { return max_observed_; }
  const std::map<long, std::uint64_t>& histogram() const { return histogram_; }

  /// Empirical k-th raw moment, k = 1..4.
  double raw_moment(int k) const;
  double mean() const { return raw_moment(1); }
  /// Standard error of the mean (unbiased sample variance over n).
  double stderr_mean() const;

  unsigned __int128 power_sum(int k) const;

 private:
  double lambda_ = 0.0;
  std::uint64_t seed_ = 0;
  std::uint64_t n_ = 0;
  long max_observed_ = 0;
  std::map<long, std::uint64_t> histogram_;
  unsigned __int128 sums_[4] = {0, 0, 0, 0};

  friend EmpiricalSummary merge(const EmpiricalSummary& a, const EmpiricalSummary& b);
};

/// Runs replicates [first_replicate, first_replicate + n). Deterministic in
/// (seed, replicate index) alone: splitting a run into batches and merging
/// the summaries reproduces the single-run result exactly.
EmpiricalSummary simulate_many(const TrafficIntensity& ti, std::uint64_t n, RngSeed seed,
                               std::uint64_t step_cap = kDefaultStepCap,
                               std::uint64_t first_replicate = 0);

/// Combines summaries from disjoint replicate ranges or seeds.
EmpiricalSummary merge(const EmpiricalSummary& a, const EmpiricalSummary& b);

struct TailEstimate {
  double p;
  double stderr;
};

/// Empirical Pr[L > l] with its binomial standard error.
TailEstimate empirical_tail(const EmpiricalSummary& s, long l);

nlohmann::json to_json(const EmpiricalSummary& s);
EmpiricalSummary summary_from_json(const nlohmann::json& j);

}  // namespace qmax::simulate

#endif  // QMAX_SIMULATE_HPP
