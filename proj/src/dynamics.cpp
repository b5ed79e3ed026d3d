#include "hyptime/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hyptime/errors.hpp"

namespace hyptime {

bool Domain::contains(double x) const { return x >= lo && x <= hi; }

double Domain::wrap(double x) const {
  if (kind == DomainKind::interval) return x;
  if (x >= lo && x < hi) return x;
  const double circumference = length();
  double r = std::fmod(x - lo, circumference);
  if (r < 0.0) r += circumference;
  double y = lo + r;
  if (y >= hi) y = lo;
  return y;
}

double Domain::distance(double x, double y) const {
  const double d = std::fabs(x - y);
  if (kind == DomainKind::interval) return d;
  const double circumference = length();
  const double r = std::fmod(d, circumference);
  return std::min(r, circumference - r);
}

double MapModel::distance_to_singular(double x) const {
  double best = std::numeric_limits<double>::infinity();
  for (double s : singular_set) best = std::min(best, domain.distance(x, s));
  return best;
}

void validate_map(const MapModel& map, int grid_points) {
  const Domain& dom = map.domain;
  if (!(dom.hi > dom.lo)) throw DomainError(map.name + ": empty domain");
  if (!map.f || !map.df) throw DomainError(map.name + ": missing map or derivative");
  if (!(map.beta > 0.0)) throw DomainError(map.name + ": beta must be positive");
  for (double s : map.singular_set) {
    if (!dom.contains(s)) {
      throw DomainError(map.name + ": singular point " + std::to_string(s) +
                        " outside the domain");
    }
  }
  constexpr double kTol = 1e-12;
  const int last = dom.kind == DomainKind::circle ? grid_points : grid_points - 1;
  for (int i = 0; i < grid_points; ++i) {
    const double x = dom.lo + dom.length() * static_cast<double>(i) / last;
    const double y = map.f(x);
    if (!std::isfinite(y)) throw DomainError(map.name + ": non-finite value at " + std::to_string(x));
    if (dom.kind == DomainKind::interval && (y < dom.lo - kTol || y > dom.hi + kTol)) {
      throw DomainError(map.name + ": f(" + std::to_string(x) + ") leaves the domain");
    }
    if (map.distance_to_singular(x) > kSingularHitTolerance) {
      const double d = map.df(x);
      if (!(std::fabs(d) > 0.0) || std::isnan(d)) {
        throw DomainError(map.name + ": f' vanishes at " + std::to_string(x) + " off S");
      }
    }
  }
}

double eval_map(const MapModel& map, double x) {
  if (!map.domain.contains(x)) {
    throw DomainError("eval_map: " + std::to_string(x) + " outside the domain of " + map.name);
  }
  const double y = map.f(x);
  if (map.domain.kind == DomainKind::circle) return map.domain.wrap(y);
  // Clamp rounding spill-over at the interval ends.
  constexpr double kTol = 1e-12;
  if (y < map.domain.lo && y >= map.domain.lo - kTol) return map.domain.lo;
  if (y > map.domain.hi && y <= map.domain.hi + kTol) return map.domain.hi;
  return y;
}

double inv_deriv_norm(const MapModel& map, double x) {
  if (map.has_singularities() && map.distance_to_singular(x) == 0.0) {
    throw SingularityError("inv_deriv_norm: " + std::to_string(x) + " lies in S");
  }
  return 1.0 / std::fabs(map.df(x));
}

double dist_delta(double x, const MapModel& map, double delta) {
  if (!map.has_singularities()) return 1.0;
  const double d = map.distance_to_singular(x);
  return d <= delta ? d : 1.0;
}

OrbitStepper::OrbitStepper(const MapModel& map, double x0, double delta)
    : map_(&map), delta_(delta), x_(x0) {
  if (!map.domain.contains(x0)) {
    throw DomainError("orbit: x0 = " + std::to_string(x0) + " outside the domain of " + map.name);
  }
  if (!(delta > 0.0)) throw DomainError("orbit: delta must be positive");
  x_ = map.domain.wrap(x0);
  classify();
}

void OrbitStepper::classify() {
  if (!map_->has_singularities()) {
    dist_ = 1.0;
    hit_ = false;
    return;
  }
  dist_ = map_->distance_to_singular(x_);
  hit_ = dist_ <= kSingularHitTolerance;
}

double OrbitStepper::log_inv_deriv() const { return -std::log(std::fabs(map_->df(x_))); }

double OrbitStepper::log_dist_delta() const {
  if (!map_->has_singularities() || dist_ > delta_) return 0.0;
  return std::log(dist_);
}

void OrbitStepper::advance() {
  const double y = eval_map(*map_, x_);
  ++index_;
  if (!std::isfinite(y)) throw NumericError("orbit: non-finite iterate", index_);
  x_ = y;
  classify();
}

OrbitTrace orbit_trace(const MapModel& map, double x0, std::int64_t n, double delta) {
  if (n < 0) throw DomainError("orbit_trace: N must be non-negative");
  OrbitTrace trace;
  trace.delta = delta;
  trace.requested = n;
  OrbitStepper step(map, x0, delta);
  trace.x.reserve(static_cast<std::size_t>(n) + 1);
  trace.a.reserve(static_cast<std::size_t>(n));
  trace.c.reserve(static_cast<std::size_t>(n));
  trace.x.push_back(step.x());
  for (std::int64_t j = 0; j < n; ++j) {
    if (step.at_singularity()) break;
    const double a = step.log_inv_deriv();
    if (!std::isfinite(a)) throw NumericError("orbit_trace: non-finite log-derivative", j);
    trace.a.push_back(a);
    trace.c.push_back(step.log_dist_delta());
    step.advance();
    trace.x.push_back(step.x());
  }
  trace.valid = !step.at_singularity();
  return trace;
}

double ols_slope(std::span<const double> xs, std::span<const double> ys) {
  const auto n = static_cast<double>(xs.size());
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw InsufficientDataError("ols_slope: need at least two paired points");
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw InsufficientDataError("ols_slope: abscissae are all equal");
  return sxy / sxx;
}

double estimate_beta(const MapModel& map, int n_samples, double radius) {
  if (!map.has_singularities()) {
    throw NotApplicableError("estimate_beta: " + map.name + " has no singular points");
  }
  if (n_samples < 2) throw DomainError("estimate_beta: need at least two samples per side");
  if (!(radius > 0.0)) throw DomainError("estimate_beta: radius must be positive");
  constexpr double kDecades = 6.0;
  std::vector<double> xs, ys;
  for (double s : map.singular_set) {
    for (double side : {-1.0, 1.0}) {
      for (int i = 0; i < n_samples; ++i) {
        const double t = static_cast<double>(i) / (n_samples - 1);
        const double r = radius * std::pow(10.0, -kDecades * (1.0 - t));
        const double raw = s + side * r;
        if (map.domain.kind == DomainKind::interval && !map.domain.contains(raw)) continue;
        const double x = map.domain.wrap(raw);
        const double d = map.distance_to_singular(x);
        if (!(d > 0.0)) continue;
        xs.push_back(-std::log(d));
        ys.push_back(std::log(std::fabs(map.df(x))));
      }
    }
  }
  return ols_slope(xs, ys);
}

}  // namespace hyptime
