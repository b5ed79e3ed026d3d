#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "hyptime/dynamics.hpp"
#include "hyptime/errors.hpp"
#include "hyptime/example_maps.hpp"
#include "hyptime/ht_detect.hpp"
#include "hyptime/measures.hpp"
#include "hyptime/rng.hpp"

namespace hyptime {
namespace {

void expect_probability(const DensityHistogram& h) {
  EXPECT_NEAR(h.total_mass(), 1.0, 1e-12);
  for (int i = 0; i < h.bins(); ++i) {
    EXPECT_GE(h.mass[i], 0.0);
    EXPECT_DOUBLE_EQ(h.density[i] * h.width(), h.mass[i]);
  }
}

TEST(Histogram, FromCounts) {
  const Domain d{DomainKind::interval, 0.0, 2.0};
  const DensityHistogram h = DensityHistogram::from_counts(d, {1, 3});
  EXPECT_EQ(h.mass[0], 0.25);
  EXPECT_EQ(h.density[1], 0.75);
  EXPECT_EQ(h.bin_hi(1), 2.0);
  expect_probability(h);
}

TEST(Histogram, BinIndexClampsLastEdge) {
  const Domain d{DomainKind::interval, 0.0, 1.0};
  EXPECT_EQ(bin_index(d, 4, 0.0), 0);
  EXPECT_EQ(bin_index(d, 4, 0.25), 1);
  EXPECT_EQ(bin_index(d, 4, 1.0), 3);
}

TEST(Pushforward, DoublingIsUniform) {
  const std::int64_t samples = 100000;
  const DensityHistogram h = pushforward_histogram(doubling_map(), 10, samples, 10, 1);
  expect_probability(h);
  for (double d : h.density) EXPECT_NEAR(d, 1.0, 3.0 / std::sqrt(double(samples)));
}

TEST(Pushforward, SqrtMapIsUniform) {
  const std::int64_t samples = 100000;
  const DensityHistogram h = pushforward_histogram(paper_sqrt_map(), 50, samples, 10, 2);
  expect_probability(h);
  for (double d : h.density) EXPECT_NEAR(d, 0.5, 3.0 / std::sqrt(double(samples)));
}

TEST(Pushforward, IdentityRepeatsInitialHistogram) {
  const MapModel id = identity_map();
  const DensityHistogram one = pushforward_histogram(id, 1, 5000, 8, 3);
  const DensityHistogram many = pushforward_histogram(id, 7, 5000, 8, 3);
  EXPECT_EQ(one.mass, many.mass);
  std::int64_t inside = 0;
  for (std::uint64_t i = 0; i < 5000; ++i) {
    SampleStream s(3, i);
    if (bin_index(id.domain, 8, s.uniform()) == 0) ++inside;
  }
  EXPECT_DOUBLE_EQ(one.mass[0], inside / 5000.0);
}

TEST(Pushforward, SeedDeterminism) {
  const DensityHistogram a = pushforward_histogram(paper_sqrt_map(), 20, 3000, 16, 9);
  const DensityHistogram b = pushforward_histogram(paper_sqrt_map(), 20, 3000, 16, 9);
  EXPECT_EQ(a.mass, b.mass);
}

TEST(Pushforward, Preconditions) {
  EXPECT_THROW(pushforward_histogram(doubling_map(), 0, 100, 10, 1), DomainError);
  EXPECT_THROW(pushforward_histogram(doubling_map(), 5, 5, 10, 1), DomainError);
}

TEST(Ulam, DoublingRows) {
  for (UlamMethod method : {UlamMethod::analytic, UlamMethod::monte_carlo}) {
    const UlamOperator op = ulam_matrix(doubling_map(), 4, 20000, 1, method);
    for (int i = 0; i < 4; ++i) {
      EXPECT_NEAR(op.row_sum(i), 1.0, 1e-12);
      int nonzero = 0;
      for (int j = 0; j < 4; ++j) {
        if (op.entry(i, j) > 0.0) {
          ++nonzero;
          EXPECT_NEAR(op.entry(i, j), 0.5, 0.02);
        }
      }
      EXPECT_EQ(nonzero, 2);
    }
  }
}

TEST(Ulam, SqrtMapRowStochastic) {
  for (UlamMethod method : {UlamMethod::automatic, UlamMethod::monte_carlo}) {
    const UlamOperator op = ulam_matrix(paper_sqrt_map(), 64, 500, 2, method);
    for (int i = 0; i < 64; ++i) {
      EXPECT_NEAR(op.row_sum(i), 1.0, 1e-12);
      for (const auto& [j, p] : op.rows[i]) EXPECT_GE(p, 0.0);
    }
  }
}

TEST(Ulam, TentHalves) {
  const UlamOperator op = ulam_matrix(tent_map(), 2, 10000, 1);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(op.entry(i, j), 0.5, 1e-12);
}

TEST(Ulam, RejectsTinyPartition) {
  EXPECT_THROW(ulam_matrix(doubling_map(), 1, 100, 1), DomainError);
}

TEST(Stationary, DoublingAndTentUniform) {
  for (const MapModel& m : {doubling_map(), tent_map()}) {
    const StationaryDensity s = stationary_density(ulam_matrix(m, 64, 1000, 1), 1e-13, 1000);
    expect_probability(s.histogram);
    for (double d : s.histogram.density) EXPECT_NEAR(d, 1.0, 1e-10);
  }
}

TEST(Stationary, SqrtMapAnalyticIsUniform) {
  const int k = 256;
  const StationaryDensity s =
      stationary_density(ulam_matrix(paper_sqrt_map(), k, 1000, 1), 1e-12, 100000);
  EXPECT_LE(s.residual, 1e-12);
  for (double d : s.histogram.density) EXPECT_NEAR(d, 0.5, 0.5 * 2.0 / k);
}

TEST(Stationary, SqrtMapMonteCarloNearUniform) {
  const int k = 32;
  const int spc = 20000;
  const UlamOperator op = ulam_matrix(paper_sqrt_map(), k, spc, 4, UlamMethod::monte_carlo);
  const StationaryDensity s = stationary_density(op, 1e-12, 100000);
  for (double d : s.histogram.density) EXPECT_NEAR(d, 0.5, 0.5 * (2.0 / k + 3.0 / std::sqrt(spc)));
}

TEST(Stationary, NonConvergenceCarriesResidual) {
  // A 2-cycle never settles from a non-stationary start.
  UlamOperator op;
  op.domain = {DomainKind::interval, 0.0, 1.0};
  op.k = 3;
  op.rows = {{{1, 1.0}}, {{0, 1.0}}, {{0, 1.0}}};
  try {
    stationary_density(op, 1e-12, 50);
    FAIL();
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.residual(), 1e-12);
  }
}

TEST(HtDensity, DoublingHalfEverythingHyperbolic) {
  const HTParams p = HTParams::make(0.5, 0.1, 0.5);
  const HtDensityReport r = ht_density_bound(doubling_map(), p, 10, 50000, 10, 1);
  EXPECT_EQ(r.h_mass, 1.0);
  EXPECT_FALSE(r.empty);
  EXPECT_NEAR(r.sup_density, 1.0, 0.05);
}

TEST(HtDensity, EmptySubsample) {
  const HTParams p = HTParams::make(0.4, 0.1, 0.5);
  const HtDensityReport r = ht_density_bound(doubling_map(), p, 5, 1000, 10, 1);
  EXPECT_TRUE(r.empty);
  EXPECT_EQ(r.h_mass, 0.0);
  EXPECT_EQ(r.sup_density, 0.0);
}

TEST(Birkhoff, ExactConstantDerivative) {
  const OrbitTrace t = orbit_trace(doubling_map(), 0.3, 40, 0.1);
  for (std::int64_t n = 1; n <= 40; ++n) EXPECT_EQ(birkhoff_expansion(t, n), -std::log(2.0));
  const OrbitTrace t3 = orbit_trace(linear_expanding_map(3.0), 0.123, 30, 0.1);
  EXPECT_EQ(birkhoff_expansion(t3, 30), -std::log(3.0));
  EXPECT_EQ(birkhoff_recurrence(t, 40), 0.0);
}

TEST(Birkhoff, SqrtMapExpansion) {
  const OrbitTrace t = orbit_trace(paper_sqrt_map(), 0.123456, 100000, 0.1);
  ASSERT_TRUE(t.valid);
  EXPECT_NEAR(birkhoff_expansion(t, 100000), -0.5, 0.02);
}

TEST(Birkhoff, SqrtMapRecurrenceClosedForm) {
  const OrbitTrace t = orbit_trace(paper_sqrt_map(), 0.123456, 100000, 0.1);
  EXPECT_NEAR(birkhoff_recurrence(t, 100000), 0.1 * (1.0 - std::log(0.1)), 0.03);
}

TEST(Birkhoff, RecurrenceZeroAwayFromS) {
  const OrbitTrace t = orbit_trace(paper_sqrt_map(), 0.7, 3, 0.1);
  EXPECT_EQ(birkhoff_recurrence(t, 3), 0.0);
}

TEST(Birkhoff, Additivity) {
  const MapModel m = paper_sqrt_map();
  const OrbitTrace whole = orbit_trace(m, 0.31, 3000, 0.1);
  const OrbitTrace head = orbit_trace(m, 0.31, 1000, 0.1);
  const OrbitTrace tail = orbit_trace(m, whole.x[1000], 2000, 0.1);
  const double pieces =
      (1000.0 * birkhoff_expansion(head, 1000) + 2000.0 * birkhoff_expansion(tail, 2000)) / 3000.0;
  EXPECT_NEAR(birkhoff_expansion(whole, 3000), pieces, 1e-14);
}

TEST(Birkhoff, SeriesMatchesPointwise) {
  const OrbitTrace t = orbit_trace(paper_sqrt_map(), 0.31, 1005, 0.1);
  const std::vector<BirkhoffPoint> pts = birkhoff_series(t, 100);
  ASSERT_EQ(pts.size(), 11u);
  EXPECT_EQ(pts.back().n, 1005);
  for (const BirkhoffPoint& pt : pts) {
    EXPECT_EQ(pt.expansion, birkhoff_expansion(t, pt.n));
    EXPECT_EQ(pt.recurrence, birkhoff_recurrence(t, pt.n));
  }
}

TEST(Birkhoff, RangeChecks) {
  const OrbitTrace t = orbit_trace(doubling_map(), 0.3, 5, 0.1);
  EXPECT_THROW(birkhoff_expansion(t, 6), DomainError);
  EXPECT_THROW(birkhoff_recurrence(t, 0), DomainError);
}

TEST(PairChecks, DoublingContractionAndDistortion) {
  const MapModel m = doubling_map();
  const HTParams p = HTParams::make(0.5, 0.1, 0.5);
  for (std::int64_t n : {2, 5, 20}) {
    const ContractionReport c = contraction_check(m, 0.3141, n, p, 1e-9);
    EXPECT_TRUE(c.conclusive);
    EXPECT_LE(c.max_ratio, 1.0 + 1e-6);
    const DistortionReport d = distortion_check(m, 0.3141, n, p, 1e-9);
    EXPECT_EQ(d.c1_hat, 1.0);
  }
}

std::vector<std::pair<double, std::int64_t>> sqrt_hyperbolic_points(const HTParams& p, int count) {
  const MapModel m = paper_sqrt_map();
  std::vector<std::pair<double, std::int64_t>> out;
  for (std::uint64_t s = 0; out.size() < static_cast<std::size_t>(count); ++s) {
    SampleStream rng(8, s);
    const double x0 = m.domain.from_unit(rng.uniform());
    const OrbitTrace t = orbit_trace(m, x0, 40, 0.1);
    const HTScanResult r = scan_hyperbolic_times(t, p, m);
    for (std::int64_t n : r.times) {
      if (n >= 3) {
        out.emplace_back(x0, n);
        break;
      }
    }
  }
  return out;
}

TEST(PairChecks, SqrtMapContraction) {
  const HTParams p = HTParams::make(0.78, 0.1, 0.5);
  int conclusive = 0;
  for (const auto& [x, n] : sqrt_hyperbolic_points(p, 20)) {
    const ContractionReport c = contraction_check(paper_sqrt_map(), x, n, p, 1e-9);
    if (!c.conclusive) continue;
    ++conclusive;
    EXPECT_LE(c.max_ratio, 1.05) << x << " " << n;
  }
  EXPECT_GE(conclusive, 15);
}

TEST(PairChecks, DistortionShrinksToOne) {
  const HTParams p = HTParams::make(0.78, 0.1, 0.5);
  PairCheckOptions wide;
  wide.max_image_sep = 0.05;
  int conclusive = 0;
  for (const auto& [x, n] : sqrt_hyperbolic_points(p, 10)) {
    const DistortionReport big = distortion_check(paper_sqrt_map(), x, n, p, 0.5, wide);
    const DistortionReport small = distortion_check(paper_sqrt_map(), x, n, p, 1e-10);
    if (!big.conclusive || !small.conclusive) continue;
    ++conclusive;
    EXPECT_GE(big.c1_hat, 1.0);
    EXPECT_LE(small.c1_hat, big.c1_hat);
    EXPECT_NEAR(small.c1_hat, 1.0, 1e-4);
  }
  EXPECT_GE(conclusive, 5);
}

TEST(PairChecks, WrappedArcIsRejected) {
  // With eps = 0.125 the arc around this point covers the circle before n = 40
  // while its endpoints end up 0.016 apart.
  const HTParams p = HTParams::make(0.78, 0.1, 0.5);
  const double x = 0.8890528498253103;
  PairCheckOptions wide;
  wide.max_image_sep = 0.05;
  const DistortionReport d = distortion_check(paper_sqrt_map(), x, 40, p, 0.5, wide);
  EXPECT_LT(d.radius_used, 0.125);
  EXPECT_LT(d.c1_hat, 10.0);
}

TEST(PairChecks, RequireHyperbolicTime) {
  const HTParams p = HTParams::make(0.4, 0.1, 0.5);
  EXPECT_THROW(contraction_check(doubling_map(), 0.3, 3, p, 1e-9), DomainError);
  EXPECT_THROW(distortion_check(doubling_map(), 0.3, 3, p, 1e-9), DomainError);
}

TEST(SuggestSigma, Values) {
  const SigmaSuggestion d = suggest_sigma(doubling_map(), 10, 40, 1);
  EXPECT_EQ(d.lyapunov, std::log(2.0));
  EXPECT_NEAR(d.sigma, std::sqrt(0.5), 1e-15);
  const SigmaSuggestion s = suggest_sigma(paper_sqrt_map(), 200, 2000, 1);
  EXPECT_NEAR(s.lyapunov, 0.5, 0.02);
  EXPECT_NEAR(s.sigma, std::exp(-0.25), 0.01);
  EXPECT_THROW(suggest_sigma(identity_map(), 5, 10, 1), NotApplicableError);
}

}  // namespace
}  // namespace hyptime
