#include "hyptime/ht_detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hyptime/errors.hpp"

namespace hyptime {

double HTParams::b_bound(double beta) { return std::min(0.5, 1.0 / (4.0 * beta)); }

HTParams HTParams::make(double sigma, double delta, double beta, std::optional<double> b) {
  std::vector<std::string> violations;
  if (!(sigma > 0.0 && sigma < 1.0)) violations.emplace_back("sigma must lie in (0,1)");
  if (!(delta > 0.0)) violations.emplace_back("delta must be positive");
  if (!(beta > 0.0)) violations.emplace_back("beta must be positive");
  double chosen_b = 0.0;
  if (beta > 0.0) {
    const double bound = b_bound(beta);
    chosen_b = b.value_or(0.99 * bound);
    if (!(chosen_b > 0.0 && chosen_b < bound)) {
      std::ostringstream msg;
      msg << "b must satisfy 0 < b < min{1/2, 1/(4 beta)} = " << bound << " (got " << chosen_b
          << ")";
      violations.push_back(msg.str());
    }
  }
  if (!violations.empty()) throw ConfigError(std::move(violations));

  HTParams p;
  p.sigma_ = sigma;
  p.delta_ = delta;
  p.beta_ = beta;
  p.b_ = chosen_b;
  p.log_sigma_ = std::log(sigma);
  p.b_log_sigma_ = chosen_b * p.log_sigma_;
  return p;
}

HyperbolicTimeDetector::HyperbolicTimeDetector(const HTParams& params, bool uses_distance)
    : params_(params),
      uses_distance_(uses_distance),
      min_shifted_c_(std::numeric_limits<double>::infinity()) {}

std::int64_t HyperbolicTimeDetector::blocking_horizon(double c, std::int64_t j) const {
  // Least k >= 1 with recurrence_threshold(k) <= c; thresholds decrease in k.
  if (params_.recurrence_threshold(1) <= c) return j + 1;
  auto k = static_cast<std::int64_t>(std::ceil(c / params_.b_log_sigma()));
  k = std::max<std::int64_t>(k, 1);
  while (k > 1 && params_.recurrence_threshold(k - 1) <= c) --k;
  while (params_.recurrence_threshold(k) > c) ++k;
  return j + k;
}

bool HyperbolicTimeDetector::push(double a, double c) {
  const std::int64_t j = steps_;
  min_prefix_ = std::min(min_prefix_, prefix_);
  prefix_ += params_.contraction_increment(a);
  const bool contraction = prefix_ <= min_prefix_;
  if (uses_distance_) {
    blocked_until_ = std::max(blocked_until_, blocking_horizon(c, j));
    min_shifted_c_ = std::min(min_shifted_c_, c + static_cast<double>(j) * params_.b_log_sigma());
  }
  steps_ = j + 1;
  const bool recurrence = !uses_distance_ || steps_ >= blocked_until_;
  return contraction && recurrence;
}

double HyperbolicTimeDetector::cond2_margin() const {
  if (!uses_distance_) return std::numeric_limits<double>::infinity();
  return min_shifted_c_ - static_cast<double>(steps_) * params_.b_log_sigma();
}

namespace {

void check_delta(const OrbitTrace& trace, const HTParams& params) {
  if (trace.delta != params.delta()) {
    throw DomainError("trace delta does not match the hyperbolic-time delta");
  }
}

}  // namespace

bool is_hyperbolic_time_naive(const OrbitTrace& trace, std::int64_t n, const HTParams& params,
                              bool uses_distance) {
  check_delta(trace, params);
  if (n < 1 || n > trace.length()) {
    throw DomainError("is_hyperbolic_time: n = " + std::to_string(n) + " outside [1, " +
                      std::to_string(trace.length()) + "]");
  }
  fixed_t window = 0;
  for (std::int64_t k = 1; k <= n; ++k) {
    const auto j = static_cast<std::size_t>(n - k);
    window += params.contraction_increment(trace.a[j]);
    if (window > 0) return false;
    if (uses_distance && trace.c[j] < params.recurrence_threshold(k)) return false;
  }
  return true;
}

bool is_hyperbolic_time_naive(const OrbitTrace& trace, std::int64_t n, const HTParams& params,
                              const MapModel& map) {
  return is_hyperbolic_time_naive(trace, n, params, map.has_singularities());
}

HTScanResult scan_hyperbolic_times(const OrbitTrace& trace, const HTParams& params,
                                   bool uses_distance) {
  check_delta(trace, params);
  const std::int64_t horizon = trace.length();
  HTScanResult out;
  out.flags.reserve(static_cast<std::size_t>(horizon));
  out.prefix.reserve(static_cast<std::size_t>(horizon));
  out.cond2_margin.reserve(static_cast<std::size_t>(horizon));
  HyperbolicTimeDetector detector(params, uses_distance);
  for (std::int64_t j = 0; j < horizon; ++j) {
    const auto idx = static_cast<std::size_t>(j);
    const bool hit = detector.push(trace.a[idx], uses_distance ? trace.c[idx] : 0.0);
    out.flags.push_back(hit);
    out.prefix.push_back(to_double(detector.prefix()));
    out.cond2_margin.push_back(detector.cond2_margin());
    if (hit) out.times.push_back(j + 1);
  }
  out.first = out.times.empty() ? HittingTime::censored_at(horizon)
                                : HittingTime::at(out.times.front());
  return out;
}

HTScanResult scan_hyperbolic_times(const OrbitTrace& trace, const HTParams& params,
                                   const MapModel& map) {
  return scan_hyperbolic_times(trace, params, map.has_singularities());
}

HittingTime first_ht(const OrbitTrace& trace, const HTParams& params, const MapModel& map) {
  const HTScanResult scan = scan_hyperbolic_times(trace, params, map);
  if (!scan.first.censored) return scan.first;
  if (!trace.valid) {
    throw InvalidTraceError("first_ht: orbit hit the singular set before a hyperbolic time",
                            trace.hit_index());
  }
  return scan.first;
}

FrequencyReport frequency_estimate(const HTScanResult& result, std::int64_t n) {
  if (n <= 0) throw DomainError("frequency_estimate: N must be positive");
  if (n > result.horizon()) {
    throw DomainError("frequency_estimate: N exceeds the scanned horizon");
  }
  std::vector<std::int64_t> counts(static_cast<std::size_t>(n) + 1, 0);
  for (std::int64_t m = 1; m <= n; ++m) {
    const auto i = static_cast<std::size_t>(m);
    counts[i] = counts[i - 1] + (result.flags[i - 1] ? 1 : 0);
  }
  FrequencyReport report;
  report.theta_at_N = static_cast<double>(counts.back()) / static_cast<double>(n);
  report.trailing_min = report.theta_at_N;
  for (std::int64_t m = std::max<std::int64_t>(1, n / 2); m <= n; ++m) {
    const double ratio =
        static_cast<double>(counts[static_cast<std::size_t>(m)]) / static_cast<double>(m);
    report.trailing_min = std::min(report.trailing_min, ratio);
  }
  return report;
}

FirstHtOutcome first_ht_streaming(const MapModel& map, const HTParams& params, double x0,
                                  std::int64_t horizon) {
  OrbitStepper step(map, x0, params.delta());
  HyperbolicTimeDetector detector(params, map.has_singularities());
  FirstHtOutcome out;
  for (std::int64_t n = 1; n <= horizon; ++n) {
    if (step.at_singularity()) {
      out.hit_singular = true;
      out.h = HittingTime::censored_at(n - 1);
      out.steps = n - 1;
      return out;
    }
    const bool hit = detector.push(step.log_inv_deriv(), step.log_dist_delta());
    if (hit) {
      out.h = HittingTime::at(n);
      out.steps = n;
      return out;
    }
    if (n < horizon) step.advance();
  }
  out.h = HittingTime::censored_at(horizon);
  out.steps = horizon;
  return out;
}

}  // namespace hyptime
