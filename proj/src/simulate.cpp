#include <qmax/simulate.hpp>

#include <qmax/errors.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace qmax::simulate {

namespace {

// splitmix64 finalizer as a standalone 64-bit mixer.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double u128_to_double(unsigned __int128 v) {
  return static_cast<double>(static_cast<std::uint64_t>(v >> 64)) * 0x1.0p64 +
         static_cast<double>(static_cast<std::uint64_t>(v));
}

}  // namespace

SplitMix64 replicate_stream(RngSeed seed, std::uint64_t replicate) {
  // Hash (seed, replicate) into the initial state so neighbouring
  // replicates land in unrelated parts of the sequence.
  return SplitMix64(mix64(seed.value + mix64(replicate + 0x9E3779B97F4A7C15ULL)));
}

long simulate_busy_period(const TrafficIntensity& ti, SplitMix64& rng, std::uint64_t step_cap) {
  ti.require_subcritical("simulate_busy_period (the busy period may never end)");
  if (step_cap < 1) throw std::invalid_argument("simulate_busy_period: step_cap must be >= 1");
  // Embedded jump chain: each transition is an arrival with probability
  // lambda/(lambda+1), a departure otherwise.
  const double p_arrival = ti.lambda() / (ti.lambda() + 1.0);
  long queue = 1;
  long best = 1;
  for (std::uint64_t step = 0; step < step_cap; ++step) {
    if (rng.next_unit() < p_arrival) {
      if (++queue > best) best = queue;
    } else if (--queue == 0) {
      return best;
    }
  }
  throw StepCapExceeded("simulate_busy_period: step cap " + std::to_string(step_cap) +
                            " reached before the busy period ended",
                        best);
}

void EmpiricalSummary::record(long l) {
  if (l < 1) throw std::invalid_argument("EmpiricalSummary: maxima are >= 1");
  ++n_;
  ++histogram_[l];
  if (l > max_observed_) max_observed_ = l;
  const unsigned __int128 v = static_cast<unsigned __int128>(l);
  unsigned __int128 p = v;
  for (int k = 0; k < 4; ++k) {
    sums_[k] += p;
    p *= v;
  }
}

double EmpiricalSummary::raw_moment(int k) const {
  if (k < 1 || k > 4) throw std::invalid_argument("raw_moment: k must be 1..4");
  if (n_ == 0) throw std::logic_error("raw_moment: empty summary");
  return u128_to_double(sums_[k - 1]) / static_cast<double>(n_);
}

double EmpiricalSummary::stderr_mean() const {
  if (n_ < 2) throw std::logic_error("stderr_mean: needs at least 2 samples");
  const double m1 = raw_moment(1);
  const double m2 = raw_moment(2);
  const double nf = static_cast<double>(n_);
  const double var = (m2 - m1 * m1) * nf / (nf - 1.0);
  return std::sqrt(var > 0.0 ? var / nf : 0.0);
}

unsigned __int128 EmpiricalSummary::power_sum(int k) const {
  if (k < 1 || k > 4) throw std::invalid_argument("power_sum: k must be 1..4");
  return sums_[k - 1];
}

EmpiricalSummary simulate_many(const TrafficIntensity& ti, std::uint64_t n, RngSeed seed,
                               std::uint64_t step_cap, std::uint64_t first_replicate) {
  if (n == 0) throw std::invalid_argument("simulate_many: n must be >= 1");
  EmpiricalSummary out(ti.lambda(), seed.value);
  for (std::uint64_t i = first_replicate; i < first_replicate + n; ++i) {
    SplitMix64 rng = replicate_stream(seed, i);
    try {
      out.record(simulate_busy_period(ti, rng, step_cap));
    } catch (StepCapExceeded& e) {
      e.set_replicate(i);
      throw;
    }
  }
  return out;
}

EmpiricalSummary merge(const EmpiricalSummary& a, const EmpiricalSummary& b) {
  if (a.lambda_ != b.lambda_)
    throw std::invalid_argument("merge: summaries were drawn at different intensities");
  EmpiricalSummary out = a;
  out.n_ += b.n_;
  if (b.max_observed_ > out.max_observed_) out.max_observed_ = b.max_observed_;
  for (const auto& [l, c] : b.histogram_) out.histogram_[l] += c;
  for (int k = 0; k < 4; ++k) out.sums_[k] += b.sums_[k];
  return out;
}

TailEstimate empirical_tail(const EmpiricalSummary& s, long l) {
  if (l < 0) throw std::invalid_argument("empirical_tail: l must be >= 0");
  if (s.n() == 0) throw std::logic_error("empirical_tail: empty summary");
  std::uint64_t count = 0;
  for (const auto& [v, c] : s.histogram())
    if (v > l) count += c;
  const double nf = static_cast<double>(s.n());
  const double p = static_cast<double>(count) / nf;
  return {p, std::sqrt(p * (1.0 - p) / nf)};
}

nlohmann::json to_json(const EmpiricalSummary& s) {
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& [l, c] : s.histogram()) hist.push_back({l, c});
  return {{"n", s.n()},
          {"lambda", s.lambda()},
          {"seed", s.seed()},
          {"histogram", hist},
          {"mean", s.mean()},
          {"m2", s.raw_moment(2)},
          {"m3", s.raw_moment(3)},
          {"m4", s.raw_moment(4)},
          {"stderr_mean", s.stderr_mean()}};
}

EmpiricalSummary summary_from_json(const nlohmann::json& j) {
  EmpiricalSummary out(j.at("lambda").get<double>(), j.at("seed").get<std::uint64_t>());
  for (const auto& row : j.at("histogram")) {
    const long l = row.at(0).get<long>();
    const std::uint64_t c = row.at(1).get<std::uint64_t>();
    for (std::uint64_t i = 0; i < c; ++i) out.record(l);
  }
  if (out.n() != j.at("n").get<std::uint64_t>())
    throw std::invalid_argument("summary_from_json: histogram does not sum to n");
  return out;
}

}  // namespace qmax::simulate
