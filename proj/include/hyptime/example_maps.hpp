#pragma once

// Builtin maps and the exact-arithmetic toolkit for the square-root circle map
//
//   f(x) = 2 sqrt(x) - 1    (x >= 0),      f(x) = 1 - 2 sqrt(|x|)   (x < 0)
//
// on [-1, 1] with -1 ~ 1. Lebesgue measure is invariant, S = {0}, beta = 1/2,
// and x = 1 is a neutral fixed point. Its inverse branch g(y) = (1 + y)^2 / 4
// generates the sequence x_n = g^n(0) -> 1 whose slow approach makes the first
// hyperbolic time non-integrable.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "hyptime/dynamics.hpp"

namespace hyptime {

MapModel paper_sqrt_map();
MapModel doubling_map();
/// x -> 1 - |2x - 1| on [0, 1].
MapModel tent_map();
/// x -> c x mod 1 on the circle [0, 1); c > 1.
MapModel linear_expanding_map(double c);
/// Identity on [0, 1]. Used as a degenerate reference.
MapModel identity_map();

/// g(y) = (1 + y)^2 / 4, exact for rationals. Throws DomainError unless -1 < y < 1.
double inverse_branch_g(double y);
mpq_class inverse_branch_g(const mpq_class& y);

/// |g_+'(y)| + |g_-'(y)| for the two inverse branches g_+(y) = (1+y)^2/4 and
/// g_-(y) = -(1-y)^2/4. Throws DomainError at y = +-1 where one branch is lost.
double branch_derivative_sum(double y);
mpq_class branch_derivative_sum(const mpq_class& y);

inline constexpr std::size_t kDefaultRationalBitBudget = 1'000'000;

struct RationalSequence {
  /// Exact x_1..x_m for the m indices inside the bit budget.
  std::vector<mpq_class> exact;
  /// x_1..x_N in double precision, from the y-recurrence.
  std::vector<double> approx;
  /// 1 - x_n for n = 1..N in double precision.
  std::vector<double> gap;
  /// First index whose exact value would exceed the budget, if any.
  std::optional<std::int64_t> float_handoff;
};

/// x_n = g^n(0) for n = 1..N. Exact values stop once numerator or denominator
/// would need more than `bit_budget` bits; the floating companion iterates
/// y_{n+1} = y_n - y_n^2 / 4 on y_n = 1 - x_n for all n.
RationalSequence xn_sequence(std::int64_t n, std::size_t bit_budget = kDefaultRationalBitBudget);

/// Floating gaps y_n = 1 - x_n, n = 1..N.
std::vector<double> gap_sequence(std::int64_t n);

/// sum_{n=1}^{N} n (x_{n+1} - x_n), exact. Requires x_{N+1} within the budget.
mpq_class series_partial_exact(std::int64_t n,
                               std::size_t bit_budget = kDefaultRationalBitBudget);

/// Floating partial sums S_1..S_N with terms n y_n^2 / 4 = n (x_{n+1} - x_n).
std::vector<double> series_partial_sums(std::int64_t n);
double series_partial(std::int64_t n);

/// Bits needed by the larger of numerator and denominator.
std::size_t rational_bits(const mpq_class& q);

/// First index j >= 0 with dist(x_j, S) <= radius, or nullopt within the horizon.
std::optional<std::int64_t> first_entry_time(const MapModel& map, double x0, double radius,
                                             std::int64_t horizon);

}  // namespace hyptime
