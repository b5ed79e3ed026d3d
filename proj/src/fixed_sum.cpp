#include "hyptime/fixed_sum.hpp"

#include <cstdlib>
#include <stdexcept>

namespace hyptime {

fixed_t to_fixed(double x) {
  if (x == 0.0) return 0;
  if (!std::isfinite(x) || std::fabs(x) >= 0x1p60) {
    throw std::overflow_error("to_fixed: term outside the fixed-point range");
  }
  int exponent = 0;
  const double frac = std::frexp(x, &exponent);  // |frac| in [0.5, 1)
  const auto mantissa = static_cast<std::int64_t>(std::ldexp(frac, 53));
  const int shift = exponent - 53 + kFixedFractionBits;
  if (shift >= 0) return static_cast<fixed_t>(mantissa) << shift;
  const int down = -shift;
  if (down > 54) return 0;
  const std::int64_t magnitude = std::llabs(mantissa);
  const std::int64_t rounded = (magnitude + (std::int64_t{1} << (down - 1))) >> down;
  return mantissa < 0 ? -static_cast<fixed_t>(rounded) : static_cast<fixed_t>(rounded);
}

double to_double(fixed_t v) {
  return std::ldexp(static_cast<double>(v), -kFixedFractionBits);
}

double fixed_mean(fixed_t sum, std::int64_t n) {
  if (n <= 0) throw std::invalid_argument("fixed_mean: n must be positive");
  const fixed_t quotient = sum / n;
  const fixed_t remainder = sum % n;
  return to_double(quotient) +
         std::ldexp(static_cast<double>(remainder) / static_cast<double>(n),
                    -kFixedFractionBits);
}

}  // namespace hyptime
