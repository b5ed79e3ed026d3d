#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hyptime/dynamics.hpp"
#include "hyptime/errors.hpp"
#include "hyptime/example_maps.hpp"
#include "hyptime/ht_detect.hpp"
#include "hyptime/rng.hpp"

namespace hyptime {
namespace {

HTParams sqrt_params(double sigma = 0.78, double delta = 0.1) {
  return HTParams::make(sigma, delta, 0.5);
}

TEST(HTParams, DefaultB) {
  const HTParams p = HTParams::make(0.5, 0.1, 0.5);
  EXPECT_DOUBLE_EQ(p.b(), 0.99 * 0.5);
  const HTParams q = HTParams::make(0.5, 0.1, 2.0);
  EXPECT_DOUBLE_EQ(q.b(), 0.99 * 0.125);
}

TEST(HTParams, Rejections) {
  EXPECT_THROW(HTParams::make(1.0, 0.1, 0.5), ConfigError);
  EXPECT_THROW(HTParams::make(0.0, 0.1, 0.5), ConfigError);
  EXPECT_THROW(HTParams::make(0.5, 0.0, 0.5), ConfigError);
  EXPECT_THROW(HTParams::make(0.5, 0.1, 0.5, 0.6), ConfigError);
  EXPECT_THROW(HTParams::make(0.5, 0.1, 0.5, 0.5), ConfigError);
  EXPECT_THROW(HTParams::make(0.5, 0.1, 0.5, 0.0), ConfigError);
  try {
    HTParams::make(1.0, -1.0, 0.5, 0.6);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_GE(e.violations().size(), 3u);
    EXPECT_NE(std::string(e.what()).find("sigma must lie in (0,1)"), std::string::npos);
  }
}

TEST(NaiveOracle, DoublingHalfIsAlwaysHyperbolic) {
  const MapModel m = doubling_map();
  const HTParams p = HTParams::make(0.5, 0.1, m.beta);
  const OrbitTrace t = orbit_trace(m, 0.1234, 40, 0.1);
  for (std::int64_t n = 1; n <= t.length(); ++n) EXPECT_TRUE(is_hyperbolic_time_naive(t, n, p, m));
}

TEST(NaiveOracle, DoublingBelowHalfNever) {
  const MapModel m = doubling_map();
  const HTParams p = HTParams::make(0.4, 0.1, m.beta);
  const OrbitTrace t = orbit_trace(m, 0.1234, 10, 0.1);
  EXPECT_FALSE(is_hyperbolic_time_naive(t, 1, p, m));
}

TEST(NaiveOracle, RangeAndDeltaChecks) {
  const MapModel m = doubling_map();
  const OrbitTrace t = orbit_trace(m, 0.1234, 10, 0.1);
  EXPECT_THROW(is_hyperbolic_time_naive(t, 0, HTParams::make(0.5, 0.1, 0.5), m), DomainError);
  EXPECT_THROW(is_hyperbolic_time_naive(t, 11, HTParams::make(0.5, 0.1, 0.5), m), DomainError);
  EXPECT_THROW(is_hyperbolic_time_naive(t, 5, HTParams::make(0.5, 0.2, 0.5), m), DomainError);
}

// Both inequalities evaluated in product form on a freshly iterated orbit.
bool direct_definition(const MapModel& m, double x0, std::int64_t n, double sigma, double delta,
                       double b) {
  std::vector<double> xs{x0};
  for (std::int64_t j = 0; j < n; ++j) xs.push_back(eval_map(m, xs.back()));
  for (std::int64_t k = 1; k <= n; ++k) {
    double prod = 1.0;
    for (std::int64_t j = n - k; j < n; ++j) prod *= 1.0 / std::fabs(m.df(xs[j]));
    if (!(prod <= std::pow(sigma, static_cast<double>(k)))) return false;
    const double d = std::fabs(xs[n - k]);
    const double dd = d <= delta ? d : 1.0;
    if (!(dd >= std::pow(sigma, b * static_cast<double>(k)))) return false;
  }
  return true;
}

TEST(NaiveOracle, SqrtMapMatchesDirectDefinition) {
  const MapModel m = paper_sqrt_map();
  const HTParams p = sqrt_params();
  const OrbitTrace t = orbit_trace(m, 0.7, 50, 0.1);
  ASSERT_TRUE(t.valid);
  int hits = 0;
  for (std::int64_t n = 1; n <= 50; ++n) {
    const bool expect = direct_definition(m, 0.7, n, 0.78, 0.1, p.b());
    EXPECT_EQ(is_hyperbolic_time_naive(t, n, p, m), expect) << "n = " << n;
    hits += expect;
  }
  EXPECT_GT(hits, 0);
  EXPECT_LT(hits, 50);
}

TEST(Scan, MatchesNaiveOnRandomOrbits) {
  const MapModel maps[] = {doubling_map(), paper_sqrt_map(), tent_map()};
  for (const MapModel& m : maps) {
    for (double sigma : {0.4, 0.5, 0.78}) {
      const HTParams p = HTParams::make(sigma, 0.1, m.beta);
      for (std::uint64_t s = 0; s < 5; ++s) {
        SampleStream rng(99, s);
        const OrbitTrace t = orbit_trace(m, m.domain.from_unit(rng.uniform()), 600, 0.1);
        const HTScanResult r = scan_hyperbolic_times(t, p, m);
        ASSERT_EQ(r.horizon(), t.length());
        for (std::int64_t n = 1; n <= t.length(); ++n) {
          ASSERT_EQ(r.flags[n - 1], is_hyperbolic_time_naive(t, n, p, m))
              << m.name << " sigma " << sigma << " n " << n;
        }
      }
    }
  }
}

TEST(Scan, TimesMatchFlags) {
  const MapModel m = paper_sqrt_map();
  const OrbitTrace t = orbit_trace(m, 0.7, 3000, 0.1);
  const HTScanResult r = scan_hyperbolic_times(t, sqrt_params(), m);
  std::vector<std::int64_t> expect;
  for (std::int64_t n = 1; n <= r.horizon(); ++n)
    if (r.flags[n - 1]) expect.push_back(n);
  EXPECT_EQ(r.times, expect);
  ASSERT_FALSE(r.times.empty());
  EXPECT_EQ(r.first, HittingTime::at(r.times.front()));
}

TEST(Scan, DoublingHalfAllTrue) {
  const MapModel m = doubling_map();
  const OrbitTrace t = orbit_trace(m, 0.3, 30, 0.1);
  const HTScanResult r = scan_hyperbolic_times(t, HTParams::make(0.5, 0.1, 0.5), m);
  ASSERT_EQ(r.times.size(), 30u);
  for (std::int64_t n = 1; n <= 30; ++n) EXPECT_EQ(r.times[n - 1], n);
  EXPECT_EQ(r.first, HittingTime::at(1));
}

TEST(Scan, EmptyTrace) {
  const MapModel m = doubling_map();
  const OrbitTrace t = orbit_trace(m, 0.3, 0, 0.1);
  const HTScanResult r = scan_hyperbolic_times(t, HTParams::make(0.5, 0.1, 0.5), m);
  EXPECT_TRUE(r.flags.empty());
  EXPECT_TRUE(r.first.censored);
  EXPECT_EQ(r.first.value, 0);
}

TEST(Scan, EmptySingularSetIgnoresC) {
  const MapModel m = doubling_map();
  OrbitTrace t = orbit_trace(m, 0.3, 20, 0.1);
  for (double& c : t.c) c = -1e9;
  const HTScanResult r = scan_hyperbolic_times(t, HTParams::make(0.5, 0.1, 0.5), false);
  EXPECT_EQ(r.times.size(), 20u);
  for (std::int64_t n = 1; n <= 20; ++n) EXPECT_TRUE(is_hyperbolic_time_naive(t, n, HTParams::make(0.5, 0.1, 0.5), false));
}

TEST(Scan, ConcatenationClosure) {
  const MapModel m = paper_sqrt_map();
  const HTParams p = sqrt_params();
  int checked = 0;
  for (std::uint64_t s = 0; s < 30; ++s) {
    SampleStream rng(5, s);
    const OrbitTrace t = orbit_trace(m, m.domain.from_unit(rng.uniform()), 4000, 0.1);
    const HTScanResult r = scan_hyperbolic_times(t, p, m);
    for (std::size_t i = 0; i < r.times.size() && i < 5; ++i) {
      const std::int64_t n = r.times[i];
      const OrbitTrace tail = orbit_trace(m, t.x[n], t.length() - n, 0.1);
      const HTScanResult rt = scan_hyperbolic_times(tail, p, m);
      for (std::int64_t k : rt.times) {
        ASSERT_TRUE(r.flags[n + k - 1]) << "n " << n << " k " << k;
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 100);
}

TEST(Scan, MonotoneInSigmaForContraction) {
  const MapModel m = paper_sqrt_map();
  const double b = 0.3;
  for (std::uint64_t s = 0; s < 20; ++s) {
    SampleStream rng(17, s);
    const OrbitTrace t = orbit_trace(m, m.domain.from_unit(rng.uniform()), 2000, 0.1);
    const HTScanResult lo = scan_hyperbolic_times(t, HTParams::make(0.7, 0.1, 0.5, b), false);
    const HTScanResult hi = scan_hyperbolic_times(t, HTParams::make(0.85, 0.1, 0.5, b), false);
    for (std::int64_t n = 1; n <= t.length(); ++n) {
      if (lo.flags[n - 1]) ASSERT_TRUE(hi.flags[n - 1]) << n;
    }
  }
}

// Raising sigma relaxes the contraction bound but raises sigma^{bk}, so the
// recurrence condition gets stricter and full monotonicity fails.
TEST(Scan, RecurrenceConditionBreaksSigmaMonotonicity) {
  const MapModel m = paper_sqrt_map();
  const double b = 0.3;
  int counterexamples = 0;
  for (std::uint64_t s = 0; s < 20 && counterexamples == 0; ++s) {
    SampleStream rng(17, s);
    const double x0 = m.domain.from_unit(rng.uniform());
    const OrbitTrace t = orbit_trace(m, x0, 2000, 0.1);
    const HTScanResult lo = scan_hyperbolic_times(t, HTParams::make(0.7, 0.1, 0.5, b), m);
    const HTScanResult hi = scan_hyperbolic_times(t, HTParams::make(0.85, 0.1, 0.5, b), m);
    for (std::int64_t n = 1; n <= t.length(); ++n) {
      if (lo.flags[n - 1] && !hi.flags[n - 1]) {
        EXPECT_TRUE(direct_definition(m, x0, n, 0.7, 0.1, b));
        EXPECT_FALSE(direct_definition(m, x0, n, 0.85, 0.1, b));
        ++counterexamples;
        break;
      }
    }
  }
  EXPECT_GT(counterexamples, 0);
}

TEST(Scan, DetectorPrefixMatchesTrace) {
  const MapModel m = paper_sqrt_map();
  const HTParams p = sqrt_params();
  const OrbitTrace t = orbit_trace(m, 0.31, 100, 0.1);
  HyperbolicTimeDetector det(p, true);
  fixed_t expect = 0;
  for (std::int64_t j = 0; j < t.length(); ++j) {
    det.push(t.a[j], t.c[j]);
    expect += p.contraction_increment(t.a[j]);
    EXPECT_EQ(det.prefix(), expect);
  }
}

TEST(FirstHt, DoublingHalf) {
  const MapModel m = doubling_map();
  const OrbitTrace t = orbit_trace(m, 0.3, 10, 0.1);
  EXPECT_EQ(first_ht(t, HTParams::make(0.5, 0.1, 0.5), m), HittingTime::at(1));
}

TEST(FirstHt, CensoredWhenNoneFound) {
  const MapModel m = doubling_map();
  const OrbitTrace t = orbit_trace(m, 0.3, 100, 0.1);
  EXPECT_EQ(first_ht(t, HTParams::make(0.4, 0.1, 0.5), m), HittingTime::censored_at(100));
}

TEST(FirstHt, InvalidTracePropagates) {
  const MapModel m = paper_sqrt_map();
  const OrbitTrace t = orbit_trace(m, 25.0 / 64.0, 10, 0.1);
  try {
    first_ht(t, HTParams::make(0.3, 0.1, 0.5), m);
    FAIL();
  } catch (const InvalidTraceError& e) {
    EXPECT_EQ(e.truncated_at(), 2);
  }
}

TEST(FirstHt, StreamingAgreesWithScan) {
  const MapModel m = paper_sqrt_map();
  const HTParams p = sqrt_params();
  for (std::uint64_t s = 0; s < 200; ++s) {
    SampleStream rng(3, s);
    const double x0 = m.domain.from_unit(rng.uniform());
    const OrbitTrace t = orbit_trace(m, x0, 500, 0.1);
    const HTScanResult r = scan_hyperbolic_times(t, p, m);
    const FirstHtOutcome o = first_ht_streaming(m, p, x0, 500);
    if (!r.times.empty()) {
      EXPECT_EQ(o.h, HittingTime::at(r.times.front()));
      for (std::int64_t n = 1; n < r.times.front(); ++n)
        ASSERT_FALSE(is_hyperbolic_time_naive(t, n, p, m));
    } else if (t.valid) {
      EXPECT_EQ(o.h, HittingTime::censored_at(500));
    }
  }
}

TEST(Frequency, Counting) {
  HTScanResult all;
  all.flags.assign(100, true);
  for (int n = 1; n <= 100; ++n) all.times.push_back(n);
  EXPECT_EQ(frequency_estimate(all, 100).theta_at_N, 1.0);
  EXPECT_EQ(frequency_estimate(all, 100).trailing_min, 1.0);

  HTScanResult none;
  none.flags.assign(100, false);
  EXPECT_EQ(frequency_estimate(none, 100).theta_at_N, 0.0);

  HTScanResult even;
  for (int n = 1; n <= 100; ++n) {
    even.flags.push_back(n % 2 == 0);
    if (n % 2 == 0) even.times.push_back(n);
  }
  EXPECT_EQ(frequency_estimate(even, 100).theta_at_N, 0.5);
  EXPECT_LT(frequency_estimate(even, 100).trailing_min, 0.5);

  EXPECT_THROW(frequency_estimate(all, 0), DomainError);
  EXPECT_THROW(frequency_estimate(all, 101), DomainError);
}

}  // namespace
}  // namespace hyptime
