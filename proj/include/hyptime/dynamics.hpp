#pragma once

// One-dimensional maps with a finite singular set, and the orbit data every
// hyperbolic-time computation consumes.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace hyptime {

enum class DomainKind { interval, circle };

/// Interval [lo, hi], or the circle obtained by gluing lo ~ hi.
/// Circle points are represented in [lo, hi).
struct Domain {
  DomainKind kind = DomainKind::interval;
  double lo = 0.0;
  double hi = 1.0;

  double length() const { return hi - lo; }
  bool contains(double x) const;
  /// Reduces x modulo the circumference for circles; identity on intervals.
  double wrap(double x) const;
  /// Euclidean distance on intervals, arc distance on circles.
  double distance(double x, double y) const;
  /// Points at which a uniform sample is drawn: lo + u * length.
  double from_unit(double u) const { return lo + u * length(); }
};

/// A monotone piece of the map together with its inverse, used for exact
/// transfer-operator discretization.
struct MonotoneBranch {
  double lo = 0.0;  // branch interval [lo, hi)
  double hi = 0.0;
  double image_lo = 0.0;
  double image_hi = 0.0;
  bool increasing = true;
  std::function<double(double)> inverse;
};

struct MapModel {
  std::string name;
  Domain domain;
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::vector<double> singular_set;
  double beta = 0.5;
  std::vector<MonotoneBranch> branches;

  double distance_to_singular(double x) const;
  bool has_singularities() const { return !singular_set.empty(); }
};

/// Checks the MapModel invariants (S inside the domain, f maps the domain into
/// itself on a sample grid to 1e-12, f' nonzero off S). Throws DomainError.
void validate_map(const MapModel& map, int grid_points = 4097);

/// Distance below which an orbit point counts as an exact hit of S.
inline constexpr double kSingularHitTolerance = 1e-15;

double eval_map(const MapModel& map, double x);

/// 1 / |f'(x)|. Throws SingularityError on S.
double inv_deriv_norm(const MapModel& map, double x);

/// dist(x, S) when it is at most delta, and 1 otherwise; 1 when S is empty.
double dist_delta(double x, const MapModel& map, double delta);

struct OrbitTrace {
  std::vector<double> x;  // x_0 .. x_N
  std::vector<double> a;  // -log|f'(x_j)|, j < N
  std::vector<double> c;  // log dist_delta(x_j, S), j < N
  double delta = 0.0;
  bool valid = true;
  /// Number of iterates requested; a.size() is smaller when the orbit hit S.
  std::int64_t requested = 0;

  std::int64_t length() const { return static_cast<std::int64_t>(a.size()); }
  /// Index of the orbit point that hit S, or -1.
  std::int64_t hit_index() const { return valid ? -1 : length(); }
};

/// Iterates x0 for N steps. An orbit point within kSingularHitTolerance of S
/// ends the trace at that index and marks it invalid.
OrbitTrace orbit_trace(const MapModel& map, double x0, std::int64_t n, double delta);

/// Streaming orbit generator shared by traces and ensemble drivers.
class OrbitStepper {
 public:
  OrbitStepper(const MapModel& map, double x0, double delta);

  double x() const { return x_; }
  std::int64_t index() const { return index_; }
  /// True when the current point is an exact hit of S.
  bool at_singularity() const { return hit_; }
  /// a_j and c_j at the current point (not valid when at_singularity()).
  double log_inv_deriv() const;
  double log_dist_delta() const;
  /// Moves to f(x). Throws NumericError on a non-finite value.
  void advance();

 private:
  void classify();

  const MapModel* map_;
  double delta_;
  double x_;
  std::int64_t index_ = 0;
  double dist_ = 1.0;
  bool hit_ = false;
};

/// Pooled least-squares slope of log|f'(x)| against -log dist(x, S) over
/// log-spaced points on both sides of every singular point, at distances in
/// [radius * 1e-6, radius]. Throws NotApplicableError when S is empty.
double estimate_beta(const MapModel& map, int n_samples, double radius);

/// Least-squares slope of ys against xs.
double ols_slope(std::span<const double> xs, std::span<const double> ys);

}  // namespace hyptime
