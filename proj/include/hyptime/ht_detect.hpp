#pragma once

// Detection of (sigma, delta)-hyperbolic times along an orbit.
//
// n is a hyperbolic time for x when, for every 1 <= k <= n,
//
//   sum_{j=n-k}^{n-1} a_j <= k log(sigma)          (backward contraction)
//   c_{n-k}               >= b k log(sigma)        (slow recurrence to S)
//
// with a_j = -log|f'(x_j)| and c_j = log dist_delta(x_j, S). When S is empty
// only the first condition applies. All comparisons are non-strict.

#include <cstdint>
#include <optional>
#include <vector>

#include "hyptime/dynamics.hpp"
#include "hyptime/fixed_sum.hpp"

namespace hyptime {

class HTParams {
 public:
  /// Validates 0 < sigma < 1, delta > 0, beta > 0 and 0 < b < min{1/2, 1/(4 beta)}.
  /// When b is absent it defaults to 0.99 of the bound.
  static HTParams make(double sigma, double delta, double beta, std::optional<double> b = {});

  /// min{1/2, 1/(4 beta)}.
  static double b_bound(double beta);

  double sigma() const { return sigma_; }
  double delta() const { return delta_; }
  double b() const { return b_; }
  double beta() const { return beta_; }
  double log_sigma() const { return log_sigma_; }
  /// b * log(sigma), the per-step recurrence threshold (negative).
  double b_log_sigma() const { return b_log_sigma_; }

  /// Fixed-point value of a_j - log(sigma); condition 1 compares window sums
  /// of these increments against zero.
  fixed_t contraction_increment(double a) const { return to_fixed(a - log_sigma_); }

  /// k * b * log(sigma), the right-hand side of condition 2 for window length k.
  double recurrence_threshold(std::int64_t k) const {
    return static_cast<double>(k) * b_log_sigma_;
  }

 private:
  HTParams() = default;

  double sigma_ = 0.5;
  double delta_ = 1.0;
  double b_ = 0.25;
  double beta_ = 0.5;
  double log_sigma_ = 0.0;
  double b_log_sigma_ = 0.0;
};

/// A first-passage time that may lie beyond the observation window.
struct HittingTime {
  std::int64_t value = 0;     // the time itself, or the horizon when censored
  bool censored = false;

  static HittingTime at(std::int64_t n) { return {n, false}; }
  static HittingTime censored_at(std::int64_t horizon) { return {horizon, true}; }
  bool operator==(const HittingTime&) const = default;
};

struct HTScanResult {
  std::vector<bool> flags;            // flags[n-1] for n = 1..horizon
  std::vector<std::int64_t> times;    // n with flags[n-1] set, increasing
  HittingTime first;
  /// P_n = sum_{j<n} (a_j - log sigma), n = 1..horizon.
  std::vector<double> prefix;
  /// min_{1<=k<=n} (c_{n-k} - k b log sigma); +inf when S is empty.
  std::vector<double> cond2_margin;

  std::int64_t horizon() const { return static_cast<std::int64_t>(flags.size()); }
};

/// Online detector: feed (a_j, c_j) for j = 0, 1, ... and learn after each
/// step whether n = j + 1 is a hyperbolic time. O(1) amortized per step.
///
/// Condition 1 holds at n iff P_n <= min_{0<=m<n} P_m (running minimum of the
/// exact prefix sums). For condition 2, each j blocks the times
/// j < n < j + K_j where K_j is the least k >= 1 with k b log(sigma) <= c_j;
/// the condition holds at n iff n >= max_{j<n} (j + K_j) (running maximum).
class HyperbolicTimeDetector {
 public:
  HyperbolicTimeDetector(const HTParams& params, bool uses_distance);

  /// Consumes step j = steps(); returns whether steps() (after the call) is a
  /// hyperbolic time.
  bool push(double a, double c);

  std::int64_t steps() const { return steps_; }
  fixed_t prefix() const { return prefix_; }
  /// min_{1<=k<=n} (c_{n-k} - k b log sigma) at the current n.
  double cond2_margin() const;

 private:
  std::int64_t blocking_horizon(double c, std::int64_t j) const;

  HTParams params_;
  bool uses_distance_;
  std::int64_t steps_ = 0;
  fixed_t prefix_ = 0;
  fixed_t min_prefix_ = 0;
  std::int64_t blocked_until_ = 0;
  double min_shifted_c_ = 0.0;  // min_j (c_j + j b log sigma)
};

/// Direct evaluation of both conditions for every window length k.
/// Throws DomainError on n out of range or a delta mismatch.
bool is_hyperbolic_time_naive(const OrbitTrace& trace, std::int64_t n, const HTParams& params,
                              bool uses_distance);
bool is_hyperbolic_time_naive(const OrbitTrace& trace, std::int64_t n, const HTParams& params,
                              const MapModel& map);

/// Flags for every n = 1..trace.length() in O(N).
HTScanResult scan_hyperbolic_times(const OrbitTrace& trace, const HTParams& params,
                                   bool uses_distance);
HTScanResult scan_hyperbolic_times(const OrbitTrace& trace, const HTParams& params,
                                   const MapModel& map);

/// Smallest hyperbolic time, or censored at the trace length. Throws
/// InvalidTraceError when the trace was truncated at S before any hyperbolic
/// time appeared.
HittingTime first_ht(const OrbitTrace& trace, const HTParams& params, const MapModel& map);

struct FrequencyReport {
  double theta_at_N = 0.0;
  /// min over M in [N/2, N] of #{n_k <= M} / M: a finite-N proxy for the
  /// liminf, not the liminf itself.
  double trailing_min = 0.0;
};

FrequencyReport frequency_estimate(const HTScanResult& result, std::int64_t n);

/// First hyperbolic time of x0 computed while iterating, stopping at the first
/// hit. `hit_singular` is set when the orbit met S before any hyperbolic time.
struct FirstHtOutcome {
  HittingTime h;
  bool hit_singular = false;
  std::int64_t steps = 0;
};

FirstHtOutcome first_ht_streaming(const MapModel& map, const HTParams& params, double x0,
                                  std::int64_t horizon);

}  // namespace hyptime
