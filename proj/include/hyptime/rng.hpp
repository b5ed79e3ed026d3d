#pragma once

#include <cstdint>
#include <random>

namespace hyptime {

/// Deterministic per-sample random stream derived from (seed, sample index).
///
/// Every ensemble member owns an independent engine, so results do not depend
/// on iteration order or on how samples are distributed over workers.
class SampleStream {
 public:
  SampleStream(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32), 0x68797074u};
    engine_.seed(seq);
  }

  /// Uniform on [0, 1) with 53 random bits; portable across standard libraries.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hyptime
