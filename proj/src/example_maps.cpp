#include "hyptime/example_maps.hpp"

#include <cmath>
#include <string>

#include "hyptime/errors.hpp"

namespace hyptime {

MapModel paper_sqrt_map() {
  MapModel m;
  m.name = "paper-sqrt";
  m.domain = {DomainKind::circle, -1.0, 1.0};
  m.f = [](double x) { return x >= 0.0 ? 2.0 * std::sqrt(x) - 1.0 : 1.0 - 2.0 * std::sqrt(-x); };
  m.df = [](double x) { return 1.0 / std::sqrt(std::fabs(x)); };
  m.singular_set = {0.0};
  m.beta = 0.5;
  m.branches = {
      {0.0, 1.0, -1.0, 1.0, true, [](double y) { return 0.25 * (1.0 + y) * (1.0 + y); }},
      {-1.0, 0.0, -1.0, 1.0, true, [](double y) { return -0.25 * (1.0 - y) * (1.0 - y); }},
  };
  return m;
}

MapModel doubling_map() {
  MapModel m;
  m.name = "doubling";
  m.domain = {DomainKind::circle, 0.0, 1.0};
  m.f = [](double x) { return 2.0 * x; };
  m.df = [](double) { return 2.0; };
  m.beta = 0.5;
  m.branches = {
      {0.0, 0.5, 0.0, 1.0, true, [](double y) { return 0.5 * y; }},
      {0.5, 1.0, 0.0, 1.0, true, [](double y) { return 0.5 * (y + 1.0); }},
  };
  return m;
}

MapModel tent_map() {
  MapModel m;
  m.name = "tent";
  m.domain = {DomainKind::interval, 0.0, 1.0};
  m.f = [](double x) { return 1.0 - std::fabs(2.0 * x - 1.0); };
  m.df = [](double x) { return x < 0.5 ? 2.0 : -2.0; };
  m.beta = 0.5;
  m.branches = {
      {0.0, 0.5, 0.0, 1.0, true, [](double y) { return 0.5 * y; }},
      {0.5, 1.0, 0.0, 1.0, false, [](double y) { return 1.0 - 0.5 * y; }},
  };
  return m;
}

MapModel linear_expanding_map(double c) {
  if (!(c > 1.0) || !std::isfinite(c)) {
    throw DomainError("linear-expanding: slope c must exceed 1");
  }
  MapModel m;
  m.name = "linear-expanding";
  m.domain = {DomainKind::circle, 0.0, 1.0};
  m.f = [c](double x) { return c * x; };
  m.df = [c](double) { return c; };
  m.beta = 0.5;
  for (int i = 0; static_cast<double>(i) < c; ++i) {
    const double lo = i / c;
    const double hi = std::min(1.0, (i + 1) / c);
    const double image_hi = std::min(1.0, c - i);
    m.branches.push_back({lo, hi, 0.0, image_hi, true, [c, i](double y) { return (y + i) / c; }});
  }
  return m;
}

MapModel identity_map() {
  MapModel m;
  m.name = "identity";
  m.domain = {DomainKind::interval, 0.0, 1.0};
  m.f = [](double x) { return x; };
  m.df = [](double) { return 1.0; };
  m.beta = 0.5;
  m.branches = {{0.0, 1.0, 0.0, 1.0, true, [](double y) { return y; }}};
  return m;
}

namespace {

void require_open_unit(bool inside, const char* who) {
  if (!inside) throw DomainError(std::string(who) + ": argument must lie in (-1, 1)");
}

}  // namespace

double inverse_branch_g(double y) {
  require_open_unit(y > -1.0 && y < 1.0, "inverse_branch_g");
  return 0.25 * (1.0 + y) * (1.0 + y);
}

mpq_class inverse_branch_g(const mpq_class& y) {
  require_open_unit(y > -1 && y < 1, "inverse_branch_g");
  mpq_class s = 1 + y;
  mpq_class r = s * s / 4;
  r.canonicalize();
  return r;
}

double branch_derivative_sum(double y) {
  require_open_unit(y > -1.0 && y < 1.0, "branch_derivative_sum");
  const double plus = 0.5 * (1.0 + y);   // g_+'(y)
  const double minus = 0.5 * (1.0 - y);  // |g_-'(y)|
  return plus + minus;
}

mpq_class branch_derivative_sum(const mpq_class& y) {
  require_open_unit(y > -1 && y < 1, "branch_derivative_sum");
  mpq_class r = (1 + y) / 2 + (1 - y) / 2;
  r.canonicalize();
  return r;
}

std::size_t rational_bits(const mpq_class& q) {
  const std::size_t num = mpz_sizeinbase(q.get_num_mpz_t(), 2);
  const std::size_t den = mpz_sizeinbase(q.get_den_mpz_t(), 2);
  return std::max(num, den);
}

std::vector<double> gap_sequence(std::int64_t n) {
  if (n < 1) throw DomainError("xn_sequence: N must be at least 1");
  std::vector<double> gaps;
  gaps.reserve(static_cast<std::size_t>(n));
  double y = 1.0;  // y_0 = 1 - x_0
  for (std::int64_t i = 1; i <= n; ++i) {
    y -= 0.25 * y * y;  // 1 - g(x) = (1 - x)(3 + x) / 4 = y - y^2 / 4
    gaps.push_back(y);
  }
  return gaps;
}

RationalSequence xn_sequence(std::int64_t n, std::size_t bit_budget) {
  RationalSequence seq;
  seq.gap = gap_sequence(n);
  seq.approx.reserve(seq.gap.size());
  for (double y : seq.gap) seq.approx.push_back(1.0 - y);

  mpq_class x = 0;
  for (std::int64_t i = 1; i <= n; ++i) {
    mpq_class next = inverse_branch_g(x);
    if (rational_bits(next) > bit_budget) {
      seq.float_handoff = i;
      break;
    }
    seq.exact.push_back(next);
    x = std::move(next);
  }
  return seq;
}

mpq_class series_partial_exact(std::int64_t n, std::size_t bit_budget) {
  if (n < 1) throw DomainError("series_partial: N must be at least 1");
  const RationalSequence seq = xn_sequence(n + 1, bit_budget);
  if (seq.float_handoff) {
    throw DomainError("series_partial: x_" + std::to_string(*seq.float_handoff) +
                      " exceeds the exact bit budget; use the floating path");
  }
  mpq_class sum = 0;
  for (std::int64_t i = 1; i <= n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    sum += mpq_class(i) * (seq.exact[k] - seq.exact[k - 1]);
  }
  sum.canonicalize();
  return sum;
}

std::vector<double> series_partial_sums(std::int64_t n) {
  const std::vector<double> gaps = gap_sequence(n);
  std::vector<double> sums;
  sums.reserve(gaps.size());
  double total = 0.0;
  double carry = 0.0;  // Kahan compensation
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    const double term = static_cast<double>(i + 1) * 0.25 * gaps[i] * gaps[i];
    const double t = term - carry;
    const double next = total + t;
    carry = (next - total) - t;
    total = next;
    sums.push_back(total);
  }
  return sums;
}

double series_partial(std::int64_t n) { return series_partial_sums(n).back(); }

std::optional<std::int64_t> first_entry_time(const MapModel& map, double x0, double radius,
                                             std::int64_t horizon) {
  double x = map.domain.wrap(x0);
  for (std::int64_t j = 0; j <= horizon; ++j) {
    if (map.distance_to_singular(x) <= radius) return j;
    if (j < horizon) x = eval_map(map, x);
  }
  return std::nullopt;
}

}  // namespace hyptime
