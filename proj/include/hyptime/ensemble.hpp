#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <type_traits>

#include "hyptime/dynamics.hpp"
#include "hyptime/errors.hpp"
#include "hyptime/rng.hpp"

namespace hyptime {

/// Resample cap for orbits that hit the singular set.
inline constexpr int kMaxResamples = 64;

/// Draws Lebesgue-uniform initial points for sample `index` until `attempt`
/// accepts one (returns a value). Throws SamplingError past the cap.
template <class Attempt>
auto sample_with_retries(const MapModel& map, std::uint64_t seed, std::uint64_t index,
                         Attempt&& attempt) {
  SampleStream stream(seed, index);
  for (int tries = 0; tries < kMaxResamples; ++tries) {
    const double x0 = map.domain.from_unit(stream.uniform());
    if (auto result = attempt(x0)) return *result;
  }
  throw SamplingError("sample " + std::to_string(index) + ": no valid orbit after " +
                      std::to_string(kMaxResamples) + " draws");
}

}  // namespace hyptime
