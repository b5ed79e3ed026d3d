#pragma once

// Exact accumulation of doubles on a 2^-60 fixed-point grid.
//
// Sums of log-derivatives decide hyperbolic times through non-strict
// comparisons against zero, so the prefix scan and the per-window oracle must
// see identical sums regardless of summation order. Rounding each term once to
// the grid and adding in 128-bit integers makes every partial sum exact and
// associative. Terms must satisfy |x| < 2^60; sums stay exact up to 2^67.

#include <cmath>
#include <cstdint>

namespace hyptime {

__extension__ typedef __int128 fixed_t;

inline constexpr int kFixedFractionBits = 60;

/// Rounds `x` to the nearest multiple of 2^-60 (ties away from zero).
fixed_t to_fixed(double x);

/// Nearest double to the fixed-point value.
double to_double(fixed_t v);

/// sum / n rounded to double, with the integer quotient kept exact so that a
/// sum of n identical terms returns that term unchanged.
double fixed_mean(fixed_t sum, std::int64_t n);

}  // namespace hyptime
