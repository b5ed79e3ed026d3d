#include "hyptime/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hyptime/ensemble.hpp"
#include "hyptime/errors.hpp"

namespace hyptime {

HHistogram HHistogram::from_counts(std::vector<std::int64_t> counts,
                                   std::int64_t censored_count) {
  HHistogram h;
  h.cutoff = static_cast<std::int64_t>(counts.size());
  h.n_samples = std::accumulate(counts.begin(), counts.end(), censored_count);
  if (h.n_samples <= 0) throw DomainError("h histogram: empty ensemble");
  const auto total = static_cast<double>(h.n_samples);
  h.masses.reserve(counts.size());
  for (std::int64_t c : counts) h.masses.push_back(static_cast<double>(c) / total);
  h.censored = static_cast<double>(censored_count) / total;
  h.counts = std::move(counts);
  h.censored_count = censored_count;
  return h;
}

HHistogram HHistogram::from_masses(std::vector<double> masses) {
  if (masses.empty()) throw DomainError("h histogram: cutoff must be at least 1");
  double total = 0.0;
  for (double m : masses) {
    if (!(m >= 0.0)) throw DomainError("h histogram: masses must be non-negative");
    total += m;
  }
  if (total > 1.0 + 1e-12) throw DomainError("h histogram: masses exceed 1");
  HHistogram h;
  h.cutoff = static_cast<std::int64_t>(masses.size());
  h.masses = std::move(masses);
  h.censored = std::max(0.0, 1.0 - total);
  return h;
}

std::vector<HittingTime> h_samples(const MapModel& map, const HTParams& params,
                                   std::int64_t n_samples, std::int64_t cutoff,
                                   std::uint64_t seed) {
  if (cutoff < 1) throw DomainError("h_histogram: cutoff T must be at least 1");
  if (n_samples < 1) throw DomainError("h_histogram: ensemble size must be positive");
  std::vector<HittingTime> out;
  out.reserve(static_cast<std::size_t>(n_samples));
  for (std::int64_t i = 0; i < n_samples; ++i) {
    out.push_back(sample_with_retries(map, seed, static_cast<std::uint64_t>(i),
                                      [&](double x0) -> std::optional<HittingTime> {
                                        const FirstHtOutcome o =
                                            first_ht_streaming(map, params, x0, cutoff);
                                        if (o.hit_singular) return std::nullopt;
                                        return o.h;
                                      }));
  }
  return out;
}

HHistogram h_histogram(const MapModel& map, const HTParams& params, std::int64_t n_samples,
                       std::int64_t cutoff, std::uint64_t seed) {
  const std::vector<HittingTime> hs = h_samples(map, params, n_samples, cutoff, seed);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(cutoff), 0);
  std::int64_t censored = 0;
  for (const HittingTime& h : hs) {
    if (h.censored) {
      ++censored;
    } else {
      ++counts[static_cast<std::size_t>(h.value - 1)];
    }
  }
  HHistogram hist = HHistogram::from_counts(std::move(counts), censored);
  hist.seed = seed;
  return hist;
}

MomentReport lp_moment(const HHistogram& hist, double p) {
  if (!(p >= 1.0)) throw DomainError("lp_moment: p must be at least 1");
  MomentReport r;
  for (std::int64_t k = 1; k <= hist.cutoff; ++k) {
    r.truncated_moment += std::pow(static_cast<double>(k), p) * hist.mass(k);
  }
  r.lower_bound = hist.censored > 0.0;
  r.censored_contribution = std::pow(static_cast<double>(hist.cutoff), p) * hist.censored;
  return r;
}

double tail_double_sum(const HHistogram& hist, std::int64_t i_max) {
  if (i_max > hist.cutoff) throw DomainError("tail_double_sum: i_max exceeds the cutoff");
  // suffix[i] = sum_{k=i}^{T} k mass(k)
  std::vector<double> suffix(static_cast<std::size_t>(hist.cutoff) + 2, 0.0);
  for (std::int64_t k = hist.cutoff; k >= 1; --k) {
    suffix[static_cast<std::size_t>(k)] =
        suffix[static_cast<std::size_t>(k + 1)] + static_cast<double>(k) * hist.mass(k);
  }
  double total = 0.0;
  for (std::int64_t i = 2; i <= i_max; ++i) {
    total += static_cast<double>(i + 1) * suffix[static_cast<std::size_t>(i)];
  }
  return total;
}

double tail_exponent_fit(const HHistogram& hist, std::int64_t k_min) {
  std::vector<double> xs, ys;
  for (std::int64_t k = std::max<std::int64_t>(1, k_min); k <= hist.cutoff; ++k) {
    const double m = hist.mass(k);
    if (m > 0.0) {
      xs.push_back(std::log(static_cast<double>(k)));
      ys.push_back(std::log(m));
    }
  }
  if (xs.size() < 5) {
    throw InsufficientDataError("tail_exponent_fit: fewer than 5 nonzero masses above k_min");
  }
  return -ols_slope(xs, ys);
}

std::vector<GrowthPoint> truncated_means(const std::vector<HittingTime>& samples,
                                         const std::vector<std::int64_t>& t_grid) {
  if (samples.empty()) throw DomainError("growth_diagnostic: empty ensemble");
  std::vector<GrowthPoint> table;
  table.reserve(t_grid.size());
  for (std::int64_t t : t_grid) {
    std::int64_t sum = 0;
    for (const HittingTime& h : samples) {
      if (!h.censored || h.value >= t) {
        sum += std::min(h.value, t);
      } else {
        throw DomainError("growth_diagnostic: cutoff beyond the simulated horizon");
      }
    }
    table.push_back({t, static_cast<double>(sum) / static_cast<double>(samples.size())});
  }
  return table;
}

std::vector<GrowthPoint> growth_diagnostic(const MapModel& map, const HTParams& params,
                                           std::int64_t n_samples,
                                           const std::vector<std::int64_t>& t_grid,
                                           std::uint64_t seed) {
  if (t_grid.empty()) throw DomainError("growth_diagnostic: empty T grid");
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (t_grid[i] <= t_grid[i - 1]) throw DomainError("growth_diagnostic: T grid must increase");
  }
  const std::vector<HittingTime> hs = h_samples(map, params, n_samples, t_grid.back(), seed);
  return truncated_means(hs, t_grid);
}

}  // namespace hyptime
