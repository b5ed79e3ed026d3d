#pragma once

// Push-forward measures, transfer-operator discretization, and orbit averages.

#include <cstdint>
#include <utility>
#include <vector>

#include "hyptime/dynamics.hpp"
#include "hyptime/ht_detect.hpp"

namespace hyptime {

/// Probability masses on a uniform partition of the domain.
struct DensityHistogram {
  Domain domain;
  std::vector<double> mass;
  std::vector<double> density;  // mass / width, in 1/length units

  int bins() const { return static_cast<int>(mass.size()); }
  double width() const { return domain.length() / bins(); }
  double bin_lo(int i) const { return domain.lo + width() * i; }
  double bin_hi(int i) const { return i + 1 == bins() ? domain.hi : domain.lo + width() * (i + 1); }
  double total_mass() const;
  double sup_density() const;

  /// Normalizes integer counts; all-zero counts give an all-zero histogram.
  static DensityHistogram from_counts(const Domain& domain, const std::vector<std::int64_t>& counts);
  static DensityHistogram from_masses(const Domain& domain, std::vector<double> masses);
};

/// Index of the uniform bin containing x (clamped to the last bin).
int bin_index(const Domain& domain, int bins, double x);

/// mu_n = (1/n) sum_{j<n} f^j_* m estimated from uniform initial points, each
/// contributing its first n orbit points with weight 1/n.
DensityHistogram pushforward_histogram(const MapModel& map, std::int64_t n,
                                       std::int64_t n_samples, int bins, std::uint64_t seed);

struct UlamOperator {
  Domain domain;
  int k = 0;
  /// Sparse rows: (column, probability).
  std::vector<std::vector<std::pair<int, double>>> rows;

  double entry(int i, int j) const;
  double row_sum(int i) const;
};

enum class UlamMethod { automatic, monte_carlo, analytic };

/// Row i holds the fraction of cell i mapped into each cell j. `automatic`
/// intersects declared monotone branches exactly and falls back to stratified
/// Monte Carlo sampling otherwise.
UlamOperator ulam_matrix(const MapModel& map, int k, int samples_per_cell, std::uint64_t seed,
                         UlamMethod method = UlamMethod::automatic);

struct StationaryDensity {
  DensityHistogram histogram;
  double residual = 0.0;  // L1 change on the last iteration
  int iterations = 0;
};

/// Left fixed vector of the operator by power iteration from the uniform
/// vector. Throws ConvergenceError after max_iter iterations.
StationaryDensity stationary_density(const UlamOperator& op, double tol, int max_iter);

struct HtDensityReport {
  DensityHistogram histogram;  // distribution of f^n over the H_n subsample
  double sup_density = 0.0;
  double h_mass = 0.0;  // estimated m(H_n)
  std::int64_t hits = 0;
  bool empty = false;
};

/// Density of f^n_*(m | H_n), normalized to a probability, with its supremum.
HtDensityReport ht_density_bound(const MapModel& map, const HTParams& params, std::int64_t n,
                                 std::int64_t n_samples, int bins, std::uint64_t seed);

/// (1/n) sum_{j<n} a_j.
double birkhoff_expansion(const OrbitTrace& trace, std::int64_t n);
/// (1/n) sum_{j<n} -c_j.
double birkhoff_recurrence(const OrbitTrace& trace, std::int64_t n);

struct BirkhoffPoint {
  std::int64_t n = 0;
  double expansion = 0.0;
  double recurrence = 0.0;
};

/// Both averages at n = stride, 2 stride, ... and at the trace length, in one
/// pass. Values equal the single-n functions exactly.
std::vector<BirkhoffPoint> birkhoff_series(const OrbitTrace& trace, std::int64_t stride);

struct PairCheckOptions {
  /// Largest admissible separation of the image pair at time n.
  double max_image_sep = 1e-3;
  double min_eps = 1e-300;
  /// Evaluation points for the distortion check.
  int samples = 33;
};

struct ContractionReport {
  /// max_{1<=k<n} dist(f^{n-k}y, f^{n-k}z) / (sigma^{k/2} dist(f^n y, f^n z)).
  double max_ratio = 0.0;
  bool conclusive = true;
  double eps_used = 0.0;
};

/// Backward contraction along the symmetric pair x -+ eps/2, halving eps until
/// both orbits stay on the same side of every cut point and the image pair is
/// within max_image_sep. Throws DomainError when n is not hyperbolic for x.
ContractionReport contraction_check(const MapModel& map, double x, std::int64_t n,
                                    const HTParams& params, double eps,
                                    const PairCheckOptions& options = {});

struct DistortionReport {
  /// max / min of |(f^n)'| over the tracked neighborhood (>= 1).
  double c1_hat = 1.0;
  bool conclusive = true;
  double radius_used = 0.0;
};

/// Distortion of f^n on [x - eps, x + eps], shrunk like contraction_check.
DistortionReport distortion_check(const MapModel& map, double x, std::int64_t n,
                                  const HTParams& params, double eps,
                                  const PairCheckOptions& options = {});

struct SigmaSuggestion {
  double lyapunov = 0.0;  // Monte Carlo estimate of the Lyapunov exponent
  double sigma = 0.0;     // exp(-lyapunov / 2)
};

SigmaSuggestion suggest_sigma(const MapModel& map, std::int64_t n_samples, std::int64_t n,
                              std::uint64_t seed);

}  // namespace hyptime
