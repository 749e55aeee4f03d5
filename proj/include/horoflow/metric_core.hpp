#pragma once

// Weak metrics (asymmetric, possibly negative distances), metric functionals
// h_x(y) = d(y, x) - d(x0, x), and sampled nonexpansiveness certificates.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "horoflow/errors.hpp"
#include "horoflow/rng.hpp"

namespace horoflow {

inline constexpr double kIdentityTol = 1e-12;
inline constexpr double kInequalityTol = 1e-9;

template <class P>
struct WeakMetricSpace {
  std::string name;
  std::function<double(const P&, const P&)> dist;
  bool separates_points = true;
  // Domain predicate used to truncate orbits; empty means every value is valid.
  std::function<bool(const P&)> contains;
  // Multiplier on the inequality tolerance for spaces whose distance formula
  // carries more rounding than a plain norm.
  double ulp_budget = 1.0;

  bool in_domain(const P& p) const { return !contains || contains(p); }

  // Allowed excess for an inequality whose terms have magnitude `scale`.
  double slack(double scale) const { return kInequalityTol * ulp_budget * std::max(1.0, std::abs(scale)); }
};

template <class P>
double checked_dist(const WeakMetricSpace<P>& space, const P& x, const P& y) {
  const double d = space.dist(x, y);
  if (!std::isfinite(d)) throw DomainError(space.name + ": non-finite distance between the given pair");
  return d;
}

// max(d(x,y), d(y,x))
template <class P>
double symmetrize(const WeakMetricSpace<P>& space, const P& x, const P& y) {
  const double a = space.dist(x, y);
  const double b = space.dist(y, x);
  if (!std::isfinite(a) || !std::isfinite(b)) {
    std::ostringstream msg;
    msg << space.name << ": non-finite distance in symmetrization (d(x,y)=" << a << ", d(y,x)=" << b << ")";
    throw DomainError(msg.str());
  }
  return std::max(a, b);
}

// h_anchor(probe) = d(probe, anchor) - d(x0, anchor)
template <class P>
double eval_metric_functional(const WeakMetricSpace<P>& space, const P& x0, const P& anchor, const P& probe) {
  return checked_dist(space, probe, anchor) - checked_dist(space, x0, anchor);
}

template <class P>
struct MetricFunctionalTable {
  P basepoint;
  std::optional<P> anchor;  // empty for closed-form limit functionals
  std::string limit_tag;    // names the limit when anchor is empty
  std::vector<P> probes;
  std::vector<double> values;
};

template <class P>
MetricFunctionalTable<P> functional_table(const WeakMetricSpace<P>& space, const P& x0, const P& anchor,
                                          const std::vector<P>& probes) {
  if (probes.empty()) throw InputError("functional_table: empty probe set");
  MetricFunctionalTable<P> table{x0, anchor, {}, probes, {}};
  table.values.reserve(probes.size());
  const double offset = checked_dist(space, x0, anchor);
  for (const auto& y : probes) table.values.push_back(checked_dist(space, y, anchor) - offset);
  return table;
}

// Table of a closed-form functional, normalized so the basepoint maps to 0.
template <class P>
MetricFunctionalTable<P> functional_table(const std::string& limit_tag, const std::function<double(const P&)>& h,
                                          const P& x0, const std::vector<P>& probes) {
  if (probes.empty()) throw InputError("functional_table: empty probe set");
  MetricFunctionalTable<P> table{x0, std::nullopt, limit_tag, probes, {}};
  const double offset = h(x0);
  for (const auto& y : probes) {
    const double v = h(y) - offset;
    if (!std::isfinite(v)) throw DomainError("functional_table: non-finite value of " + limit_tag);
    table.values.push_back(v);
  }
  return table;
}

template <class P>
struct NonexpansiveReport {
  double max_ratio = 0.0;
  std::pair<P, P> worst_pair;
  std::size_t samples_used = 0;
  std::size_t skipped = 0;
  double tol = 0.0;
  bool certified = false;
};

template <class P>
using PairSampler = std::function<std::pair<P, P>(Rng&)>;

template <class P>
using PointSampler = std::function<P(Rng&)>;

// Ratios use the symmetrized metric on both sides, so nonpositive weak
// distances never reach a denominator.
template <class P>
NonexpansiveReport<P> certify_nonexpansive(const WeakMetricSpace<P>& space, const std::function<P(const P&)>& map,
                                           const PairSampler<P>& sampler, std::size_t n_samples, double tol,
                                           std::uint64_t seed) {
  if (n_samples == 0) throw InputError("certify_nonexpansive: n_samples must be at least 1");
  Rng rng(seed);
  NonexpansiveReport<P> report;
  report.tol = tol;
  bool have_pair = false;
  for (std::size_t i = 0; i < n_samples; ++i) {
    auto [x, y] = sampler(rng);
    const double before = symmetrize(space, x, y);
    if (before == 0.0) {
      ++report.skipped;
      continue;
    }
    const double after = symmetrize(space, map(x), map(y));
    const double ratio = after / before;
    ++report.samples_used;
    if (!have_pair || ratio > report.max_ratio) {
      report.max_ratio = ratio;
      report.worst_pair = {x, y};
      have_pair = true;
    }
  }
  if (report.samples_used == 0) throw InputError("certify_nonexpansive: every sampled pair was coincident");
  report.certified = report.max_ratio <= 1.0 + tol;
  return report;
}

struct AxiomReport {
  std::size_t triples = 0;
  double max_self_distance = 0.0;  // max |d(x,x)|
  double max_triangle_excess = 0.0;  // max of (d(x,y) - d(x,z) - d(z,y)) / slack
  double min_pair_sum = 0.0;  // min of d(x,y) + d(y,x)
  std::size_t identity_failures = 0;
  std::size_t triangle_failures = 0;
  bool passed() const { return identity_failures == 0 && triangle_failures == 0; }
};

template <class P>
AxiomReport check_axioms(const WeakMetricSpace<P>& space, const PointSampler<P>& sampler, std::size_t n_triples,
                         std::uint64_t seed) {
  Rng rng(seed);
  AxiomReport r;
  r.min_pair_sum = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < n_triples; ++t) {
    const P x = sampler(rng);
    const P y = sampler(rng);
    const P z = sampler(rng);
    const double dxx = checked_dist(space, x, x);
    r.max_self_distance = std::max(r.max_self_distance, std::abs(dxx));
    if (std::abs(dxx) > kIdentityTol) ++r.identity_failures;

    const double dxy = checked_dist(space, x, y);
    const double dyx = checked_dist(space, y, x);
    const double dxz = checked_dist(space, x, z);
    const double dzy = checked_dist(space, z, y);
    const double slack = space.slack(std::max({std::abs(dxy), std::abs(dxz), std::abs(dzy)}));
    const double excess = dxy - dxz - dzy;
    r.max_triangle_excess = std::max(r.max_triangle_excess, excess / slack);
    if (excess > slack) ++r.triangle_failures;
    r.min_pair_sum = std::min(r.min_pair_sum, dxy + dyx);
    ++r.triples;
  }
  return r;
}

struct FunctionalBoundsReport {
  std::size_t samples = 0;
  std::size_t lower_failures = 0;       // h(y) < -d(x0, y)
  std::size_t upper_failures = 0;       // h(y) > d(y, x0)
  std::size_t continuity_failures = 0;  // |h(y) - h(z)| > max(d(y,z), d(z,y))
  double worst_violation = 0.0;         // largest excess beyond the bound, before slack
  bool passed() const { return lower_failures == 0 && upper_failures == 0 && continuity_failures == 0; }
};

// Samples (anchor, y, z) and checks the anchor-backed functional against its
// a priori bounds and its 1-Lipschitz property in the symmetrized metric.
template <class P>
FunctionalBoundsReport check_functional_bounds(const WeakMetricSpace<P>& space, const P& x0,
                                               const PointSampler<P>& sampler, std::size_t n_samples,
                                               std::uint64_t seed) {
  Rng rng(seed);
  FunctionalBoundsReport r;
  for (std::size_t t = 0; t < n_samples; ++t) {
    const P anchor = sampler(rng);
    const P y = sampler(rng);
    const P z = sampler(rng);
    const double base = checked_dist(space, x0, anchor);
    const double dya = checked_dist(space, y, anchor);
    const double dza = checked_dist(space, z, anchor);
    const double hy = dya - base;
    const double hz = dza - base;

    const double lower = -checked_dist(space, x0, y);
    const double upper = checked_dist(space, y, x0);
    const double sym = symmetrize(space, y, z);
    const double scale = std::max({std::abs(base), std::abs(dya), std::abs(dza), std::abs(lower), std::abs(upper)});
    const double slack = space.slack(scale);

    const double v_lower = lower - hy;
    const double v_upper = hy - upper;
    const double v_cont = std::abs(hy - hz) - sym;
    r.worst_violation = std::max({r.worst_violation, v_lower, v_upper, v_cont});
    if (v_lower > slack) ++r.lower_failures;
    if (v_upper > slack) ++r.upper_failures;
    if (v_cont > slack) ++r.continuity_failures;
    ++r.samples;
  }
  return r;
}

}  // namespace horoflow
