#include "hyptime/measures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "hyptime/ensemble.hpp"
#include "hyptime/errors.hpp"
#include "hyptime/fixed_sum.hpp"

namespace hyptime {

double DensityHistogram::total_mass() const {
  return std::accumulate(mass.begin(), mass.end(), 0.0);
}

double DensityHistogram::sup_density() const {
  return density.empty() ? 0.0 : *std::max_element(density.begin(), density.end());
}

DensityHistogram DensityHistogram::from_counts(const Domain& domain,
                                               const std::vector<std::int64_t>& counts) {
  const std::int64_t total = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
  std::vector<double> masses(counts.size(), 0.0);
  if (total > 0) {
    for (std::size_t i = 0; i < counts.size(); ++i) {
      masses[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
    }
  }
  DensityHistogram h;
  h.domain = domain;
  h.mass = std::move(masses);
  h.density.resize(h.mass.size());
  for (std::size_t i = 0; i < h.mass.size(); ++i) h.density[i] = h.mass[i] / h.width();
  return h;
}

DensityHistogram DensityHistogram::from_masses(const Domain& domain, std::vector<double> masses) {
  const double total = std::accumulate(masses.begin(), masses.end(), 0.0);
  if (total > 0.0) {
    for (double& m : masses) m /= total;
  }
  DensityHistogram h;
  h.domain = domain;
  h.mass = std::move(masses);
  h.density.resize(h.mass.size());
  for (std::size_t i = 0; i < h.mass.size(); ++i) h.density[i] = h.mass[i] / h.width();
  return h;
}

int bin_index(const Domain& domain, int bins, double x) {
  const double t = (x - domain.lo) / domain.length() * bins;
  const auto i = static_cast<int>(std::floor(t));
  return std::clamp(i, 0, bins - 1);
}

DensityHistogram pushforward_histogram(const MapModel& map, std::int64_t n,
                                       std::int64_t n_samples, int bins, std::uint64_t seed) {
  if (n < 1) throw DomainError("pushforward_histogram: n must be at least 1");
  if (bins < 1 || n_samples < bins) {
    throw DomainError("pushforward_histogram: need 1 <= bins <= n_samples");
  }
  std::vector<std::int64_t> counts(static_cast<std::size_t>(bins), 0);
  std::vector<int> visited(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n_samples; ++i) {
    sample_with_retries(map, seed, static_cast<std::uint64_t>(i),
                        [&](double x0) -> std::optional<bool> {
                          OrbitStepper step(map, x0, 1.0);
                          for (std::int64_t j = 0; j < n; ++j) {
                            if (step.at_singularity()) return std::nullopt;
                            visited[static_cast<std::size_t>(j)] = bin_index(map.domain, bins, step.x());
                            if (j + 1 < n) step.advance();
                          }
                          return true;
                        });
    for (int b : visited) ++counts[static_cast<std::size_t>(b)];
  }
  return DensityHistogram::from_counts(map.domain, counts);
}

double UlamOperator::entry(int i, int j) const {
  for (const auto& [col, p] : rows.at(static_cast<std::size_t>(i))) {
    if (col == j) return p;
  }
  return 0.0;
}

double UlamOperator::row_sum(int i) const {
  double s = 0.0;
  for (const auto& [col, p] : rows.at(static_cast<std::size_t>(i))) s += p;
  return s;
}

namespace {

using SparseRow = std::map<int, double>;

std::vector<SparseRow> analytic_transitions(const MapModel& map, int k) {
  const Domain& dom = map.domain;
  const double w = dom.length() / k;
  std::vector<SparseRow> rows(static_cast<std::size_t>(k));
  for (const MonotoneBranch& br : map.branches) {
    const int j_lo = bin_index(dom, k, br.image_lo);
    const int j_hi = bin_index(dom, k, br.image_hi);
    for (int j = j_lo; j <= j_hi; ++j) {
      const double u = std::max(br.image_lo, dom.lo + w * j);
      const double v = std::min(br.image_hi, j + 1 == k ? dom.hi : dom.lo + w * (j + 1));
      if (!(v > u)) continue;
      double p = br.inverse(u), q = br.inverse(v);
      if (p > q) std::swap(p, q);
      p = std::max(p, br.lo);
      q = std::min(q, br.hi);
      if (!(q > p)) continue;
      const int i_lo = bin_index(dom, k, p);
      const int i_hi = bin_index(dom, k, q);
      for (int i = i_lo; i <= i_hi; ++i) {
        const double cell_lo = dom.lo + w * i;
        const double cell_hi = i + 1 == k ? dom.hi : dom.lo + w * (i + 1);
        const double overlap = std::min(q, cell_hi) - std::max(p, cell_lo);
        if (overlap > 0.0) rows[static_cast<std::size_t>(i)][j] += overlap / w;
      }
    }
  }
  return rows;
}

std::vector<SparseRow> sampled_transitions(const MapModel& map, int k, int samples_per_cell,
                                           std::uint64_t seed) {
  if (samples_per_cell < 1) throw DomainError("ulam_matrix: samples_per_cell must be positive");
  const Domain& dom = map.domain;
  const double w = dom.length() / k;
  std::vector<SparseRow> rows(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    SampleStream stream(seed, static_cast<std::uint64_t>(i));
    for (int s = 0; s < samples_per_cell; ++s) {
      const double x = dom.lo + w * (i + (s + stream.uniform()) / samples_per_cell);
      if (map.has_singularities() && map.distance_to_singular(x) <= kSingularHitTolerance) continue;
      rows[static_cast<std::size_t>(i)][bin_index(dom, k, eval_map(map, x))] += 1.0;
    }
  }
  return rows;
}

}  // namespace

UlamOperator ulam_matrix(const MapModel& map, int k, int samples_per_cell, std::uint64_t seed,
                         UlamMethod method) {
  if (k < 2) throw DomainError("ulam_matrix: k must be at least 2");
  bool analytic = method == UlamMethod::analytic ||
                  (method == UlamMethod::automatic && !map.branches.empty());
  if (analytic && map.branches.empty()) {
    throw NotApplicableError("ulam_matrix: " + map.name + " declares no monotone branches");
  }
  std::vector<SparseRow> raw = analytic ? analytic_transitions(map, k)
                                        : sampled_transitions(map, k, samples_per_cell, seed);
  UlamOperator op;
  op.domain = map.domain;
  op.k = k;
  op.rows.resize(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const SparseRow& row = raw[static_cast<std::size_t>(i)];
    double total = 0.0;
    for (const auto& [j, v] : row) total += v;
    if (!(total > 0.0)) {
      throw DiscretizationError("ulam_matrix: cell " + std::to_string(i) + " has no transitions");
    }
    auto& out = op.rows[static_cast<std::size_t>(i)];
    for (const auto& [j, v] : row) {
      if (v > 0.0) out.emplace_back(j, v / total);
    }
  }
  return op;
}

StationaryDensity stationary_density(const UlamOperator& op, double tol, int max_iter) {
  if (op.k < 1) throw DomainError("stationary_density: empty operator");
  const auto k = static_cast<std::size_t>(op.k);
  std::vector<double> pi(k, 1.0 / op.k), next(k);
  double residual = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      for (const auto& [j, p] : op.rows[i]) next[static_cast<std::size_t>(j)] += pi[i] * p;
    }
    const double total = std::accumulate(next.begin(), next.end(), 0.0);
    residual = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      next[j] /= total;
      residual += std::fabs(next[j] - pi[j]);
    }
    pi.swap(next);
    if (residual <= tol) {
      return {DensityHistogram::from_masses(op.domain, pi), residual, it};
    }
  }
  throw ConvergenceError("stationary_density: no convergence in " + std::to_string(max_iter) +
                             " iterations",
                         residual);
}

HtDensityReport ht_density_bound(const MapModel& map, const HTParams& params, std::int64_t n,
                                 std::int64_t n_samples, int bins, std::uint64_t seed) {
  if (n < 1) throw DomainError("ht_density_bound: n must be at least 1");
  if (bins < 1 || n_samples < 1) throw DomainError("ht_density_bound: need bins, samples >= 1");
  struct Outcome {
    bool hyperbolic;
    double image;
  };
  std::vector<std::int64_t> counts(static_cast<std::size_t>(bins), 0);
  std::int64_t hits = 0;
  for (std::int64_t i = 0; i < n_samples; ++i) {
    const Outcome o = sample_with_retries(
        map, seed, static_cast<std::uint64_t>(i), [&](double x0) -> std::optional<Outcome> {
          OrbitStepper step(map, x0, params.delta());
          HyperbolicTimeDetector detector(params, map.has_singularities());
          bool flag = false;
          for (std::int64_t j = 0; j < n; ++j) {
            if (step.at_singularity()) return std::nullopt;
            flag = detector.push(step.log_inv_deriv(), step.log_dist_delta());
            step.advance();
          }
          return Outcome{flag, step.x()};
        });
    if (o.hyperbolic) {
      ++hits;
      ++counts[static_cast<std::size_t>(bin_index(map.domain, bins, o.image))];
    }
  }
  HtDensityReport report;
  report.histogram = DensityHistogram::from_counts(map.domain, counts);
  report.sup_density = report.histogram.sup_density();
  report.hits = hits;
  report.h_mass = static_cast<double>(hits) / static_cast<double>(n_samples);
  report.empty = hits == 0;
  return report;
}

namespace {

void check_window(const OrbitTrace& trace, std::int64_t n, const char* who) {
  if (n < 1 || n > trace.length()) {
    throw DomainError(std::string(who) + ": n outside [1, trace length]");
  }
}

}  // namespace

double birkhoff_expansion(const OrbitTrace& trace, std::int64_t n) {
  check_window(trace, n, "birkhoff_expansion");
  fixed_t sum = 0;
  for (std::int64_t j = 0; j < n; ++j) sum += to_fixed(trace.a[static_cast<std::size_t>(j)]);
  return fixed_mean(sum, n);
}

double birkhoff_recurrence(const OrbitTrace& trace, std::int64_t n) {
  check_window(trace, n, "birkhoff_recurrence");
  fixed_t sum = 0;
  for (std::int64_t j = 0; j < n; ++j) sum -= to_fixed(trace.c[static_cast<std::size_t>(j)]);
  return fixed_mean(sum, n);
}

std::vector<BirkhoffPoint> birkhoff_series(const OrbitTrace& trace, std::int64_t stride) {
  if (stride < 1) throw DomainError("birkhoff_series: stride must be positive");
  std::vector<BirkhoffPoint> out;
  fixed_t expansion = 0, recurrence = 0;
  const std::int64_t n_max = trace.length();
  for (std::int64_t n = 1; n <= n_max; ++n) {
    expansion += to_fixed(trace.a[static_cast<std::size_t>(n - 1)]);
    recurrence -= to_fixed(trace.c[static_cast<std::size_t>(n - 1)]);
    if (n % stride == 0 || n == n_max) {
      out.push_back({n, fixed_mean(expansion, n), fixed_mean(recurrence, n)});
    }
  }
  return out;
}

namespace {

std::vector<double> cut_points(const MapModel& map) {
  std::vector<double> cuts = map.singular_set;
  if (map.domain.kind == DomainKind::interval) {
    for (const MonotoneBranch& br : map.branches) {
      for (double e : {br.lo, br.hi}) {
        if (e > map.domain.lo && e < map.domain.hi) cuts.push_back(e);
      }
    }
  }
  return cuts;
}

bool separated_by_cut(const Domain& dom, const std::vector<double>& cuts, double y, double z) {
  const double d = dom.distance(y, z);
  for (double s : cuts) {
    if (dom.kind == DomainKind::interval) {
      if (s > std::min(y, z) && s < std::max(y, z)) return true;
    } else {
      const double dy = dom.distance(y, s), dz = dom.distance(z, s);
      if (dy < d && dz < d && dy + dz <= d * (1.0 + 1e-12)) return true;
    }
  }
  return false;
}

// Iterates the arc from y to z (short direction) for n steps, following
// interior points so that an arc wrapping around the circle is not mistaken
// for a short one. Returns the endpoint separations d_0..d_n when the arc
// stays on one side of every cut, nothing otherwise.
std::optional<std::vector<double>> track_pair(const MapModel& map, const std::vector<double>& cuts,
                                              double y, double z, std::int64_t n,
                                              double max_sep) {
  constexpr int kArcPoints = 33;
  const Domain& dom = map.domain;
  const double span = dom.distance(y, z);
  std::vector<double> pts(kArcPoints);
  for (int s = 0; s < kArcPoints; ++s) pts[static_cast<std::size_t>(s)] = dom.wrap(y + span * s / (kArcPoints - 1));
  pts.front() = y;
  pts.back() = z;
  std::vector<double> seps;
  seps.reserve(static_cast<std::size_t>(n) + 1);
  for (std::int64_t j = 0; j <= n; ++j) {
    const double d = dom.distance(pts.front(), pts.back());
    if (!(d > 0.0)) return std::nullopt;
    double arc = 0.0;
    for (std::size_t s = 0; s < pts.size(); ++s) {
      if (map.has_singularities() && map.distance_to_singular(pts[s]) <= kSingularHitTolerance) {
        return std::nullopt;
      }
      if (s == 0) continue;
      const double gap = dom.distance(pts[s - 1], pts[s]);
      if (gap >= 0.25 * dom.length() || separated_by_cut(dom, cuts, pts[s - 1], pts[s])) {
        return std::nullopt;
      }
      arc += gap;
    }
    if (arc > d * (1.0 + 1e-6)) return std::nullopt;
    seps.push_back(d);
    if (j < n) {
      for (double& p : pts) p = eval_map(map, p);
    }
  }
  if (seps.back() > max_sep) return std::nullopt;
  return seps;
}

std::pair<double, double> centered_pair(const Domain& dom, double x, double half) {
  if (dom.kind == DomainKind::circle) return {dom.wrap(x - half), dom.wrap(x + half)};
  const double lo = std::max(dom.lo, x - half);
  const double hi = std::min(dom.hi, x + half);
  return {lo, hi};
}

void require_hyperbolic(const MapModel& map, double x, std::int64_t n, const HTParams& params) {
  if (n < 1) throw DomainError("pair check: n must be at least 1");
  const OrbitTrace trace = orbit_trace(map, x, n, params.delta());
  if (trace.length() < n || !is_hyperbolic_time_naive(trace, n, params, map)) {
    throw DomainError("pair check: n = " + std::to_string(n) + " is not a hyperbolic time for x");
  }
}

}  // namespace

ContractionReport contraction_check(const MapModel& map, double x, std::int64_t n,
                                    const HTParams& params, double eps,
                                    const PairCheckOptions& options) {
  require_hyperbolic(map, x, n, params);
  if (!(eps > 0.0)) throw DomainError("contraction_check: eps must be positive");
  const std::vector<double> cuts = cut_points(map);
  ContractionReport report;
  for (double e = eps; e >= options.min_eps; e *= 0.5) {
    const auto [y, z] = centered_pair(map.domain, x, 0.5 * e);
    if (y == z) break;
    const auto seps = track_pair(map, cuts, y, z, n, options.max_image_sep);
    if (!seps) continue;
    const double final_sep = seps->back();
    double worst = 0.0;
    for (std::int64_t k = 1; k < n; ++k) {
      const double bound = std::pow(params.sigma(), 0.5 * static_cast<double>(k)) * final_sep;
      worst = std::max(worst, (*seps)[static_cast<std::size_t>(n - k)] / bound);
    }
    report.max_ratio = worst;
    report.eps_used = e;
    return report;
  }
  report.conclusive = false;
  return report;
}

DistortionReport distortion_check(const MapModel& map, double x, std::int64_t n,
                                  const HTParams& params, double eps,
                                  const PairCheckOptions& options) {
  require_hyperbolic(map, x, n, params);
  if (!(eps > 0.0)) throw DomainError("distortion_check: eps must be positive");
  if (options.samples < 2) throw DomainError("distortion_check: need at least two samples");
  const std::vector<double> cuts = cut_points(map);
  DistortionReport report;
  for (double e = eps; e >= options.min_eps; e *= 0.5) {
    const auto [y, z] = centered_pair(map.domain, x, e);
    if (y == z) break;
    if (!track_pair(map, cuts, y, z, n, options.max_image_sep)) continue;
    // Points of the tracked arc from y to z (in the short direction).
    const double span = map.domain.distance(y, z);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int s = 0; s < options.samples; ++s) {
      double p = map.domain.wrap(y + span * s / (options.samples - 1));
      double log_deriv = 0.0;
      for (std::int64_t j = 0; j < n; ++j) {
        log_deriv += std::log(std::fabs(map.df(p)));
        p = eval_map(map, p);
      }
      lo = std::min(lo, log_deriv);
      hi = std::max(hi, log_deriv);
    }
    report.c1_hat = std::exp(hi - lo);
    report.radius_used = e;
    return report;
  }
  report.conclusive = false;
  return report;
}

SigmaSuggestion suggest_sigma(const MapModel& map, std::int64_t n_samples, std::int64_t n,
                              std::uint64_t seed) {
  if (n_samples < 1 || n < 1) throw DomainError("suggest_sigma: need samples, n >= 1");
  fixed_t total = 0;
  for (std::int64_t i = 0; i < n_samples; ++i) {
    total += sample_with_retries(map, seed, static_cast<std::uint64_t>(i),
                                 [&](double x0) -> std::optional<fixed_t> {
                                   const OrbitTrace t = orbit_trace(map, x0, n, 1.0);
                                   if (!t.valid) return std::nullopt;
                                   fixed_t s = 0;
                                   for (double a : t.a) s += to_fixed(a);
                                   return s;
                                 });
  }
  SigmaSuggestion out;
  out.lyapunov = -fixed_mean(total, n_samples * n);
  if (!(out.lyapunov > 0.0)) {
    throw NotApplicableError("suggest_sigma: estimated Lyapunov exponent is not positive");
  }
  out.sigma = std::exp(-0.5 * out.lyapunov);
  return out;
}

}  // namespace hyptime
