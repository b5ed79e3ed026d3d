#pragma once

// Distribution and tail diagnostics of the first hyperbolic time h over
// Lebesgue-random ensembles. Censored samples (h beyond the cutoff) are
// counted separately and never imputed.

#include <cstdint>
#include <vector>

#include "hyptime/dynamics.hpp"
#include "hyptime/ht_detect.hpp"

namespace hyptime {

struct HHistogram {
  std::int64_t cutoff = 0;             // T
  std::vector<double> masses;          // masses[k-1] estimates m(H_k^*), k = 1..T
  double censored = 0.0;               // mass with h > T
  std::vector<std::int64_t> counts;    // raw counts behind the masses (empty when synthetic)
  std::int64_t censored_count = 0;
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;

  double mass(std::int64_t k) const { return masses.at(static_cast<std::size_t>(k - 1)); }

  /// Normalizes integer counts by the ensemble size.
  static HHistogram from_counts(std::vector<std::int64_t> counts, std::int64_t censored_count);
  /// Synthetic histogram for k = 1..T; the remainder 1 - sum is censored.
  static HHistogram from_masses(std::vector<double> masses);
};

/// h for every ensemble member (censored entries carry the cutoff).
std::vector<HittingTime> h_samples(const MapModel& map, const HTParams& params,
                                   std::int64_t n_samples, std::int64_t cutoff,
                                   std::uint64_t seed);

HHistogram h_histogram(const MapModel& map, const HTParams& params, std::int64_t n_samples,
                       std::int64_t cutoff, std::uint64_t seed);

struct MomentReport {
  double truncated_moment = 0.0;  // sum_{k<=T} k^p mass(k)
  bool lower_bound = false;       // censored mass exists
  double censored_contribution = 0.0;  // T^p * censored, a lower bound on the tail's share
};

MomentReport lp_moment(const HHistogram& hist, double p);

/// sum_{i=2}^{i_max} (i+1) sum_{k=i}^{T} k mass(k).
double tail_double_sum(const HHistogram& hist, std::int64_t i_max);

/// -slope of log mass(k) against log k over nonzero masses with k >= k_min.
double tail_exponent_fit(const HHistogram& hist, std::int64_t k_min);

struct GrowthPoint {
  std::int64_t cutoff = 0;
  double truncated_mean = 0.0;  // E[min(h, T)]
};

/// Truncated means E[min(h, T)] for every T in the grid from one shared
/// ensemble simulated to max(T_grid).
std::vector<GrowthPoint> growth_diagnostic(const MapModel& map, const HTParams& params,
                                           std::int64_t n_samples,
                                           const std::vector<std::int64_t>& t_grid,
                                           std::uint64_t seed);

/// The same table from precomputed samples.
std::vector<GrowthPoint> truncated_means(const std::vector<HittingTime>& samples,
                                         const std::vector<std::int64_t>& t_grid);

}  // namespace hyptime
