#pragma once

// Ergodic cocycles of maps: i.i.d. and circle-rotation drivers, orbits,
// the subadditive distance cocycle a(n) = d(x0, u(n) x0), Kingman exponent
// estimates and the horofunction convergence diagnostic.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "horoflow/errors.hpp"
#include "horoflow/metric_core.hpp"
#include "horoflow/parallel.hpp"
#include "horoflow/rng.hpp"

namespace horoflow {

// right_increment: u(n) = g(w) g(Tw) ... g(T^{n-1} w), newest map innermost.
// left_increment:  v(n) = g(T^{n-1} w) ... g(Tw) g(w), newest map outermost.
enum class Order { right_increment, left_increment };

enum class DriverKind { iid_finite, iid_parametric, rotation };

inline constexpr double kGoldenRotation = 0.61803398874989484820;  // (sqrt 5 - 1) / 2

inline const char* to_string(Order o) { return o == Order::right_increment ? "right_increment" : "left_increment"; }

template <class M>
class ErgodicDriver {
 public:
  using Sampler = std::function<M(Rng&)>;

 private:
  struct Data {
    DriverKind kind = DriverKind::iid_finite;
    std::vector<M> maps;
    std::vector<double> weights;
    std::vector<double> cuts;
    double alpha = kGoldenRotation;
    Sampler sampler;
    bool bounded = true;
  };

 public:

  static ErgodicDriver iid_finite(std::vector<M> maps, std::vector<double> weights, Order order,
                                  std::uint64_t master_seed) {
    if (maps.empty() || maps.size() != weights.size())
      throw InputError("iid_finite driver: need one weight per map and at least one map");
    double total = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0)) throw InputError("iid_finite driver: weights must be nonnegative");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw InputError("iid_finite driver: weights must sum to 1");
    auto d = std::make_shared<Data>();
    d->kind = DriverKind::iid_finite;
    d->maps = std::move(maps);
    d->weights = std::move(weights);
    return ErgodicDriver(std::move(d), order, master_seed);
  }

  static ErgodicDriver constant(M map, Order order = Order::right_increment, std::uint64_t master_seed = 0) {
    return iid_finite({std::move(map)}, {1.0}, order, master_seed);
  }

  // `bounded` declares that the sampled parameters have bounded support.
  static ErgodicDriver iid_parametric(Sampler sampler, Order order, std::uint64_t master_seed, bool bounded = true) {
    if (!sampler) throw InputError("iid_parametric driver: empty sampler");
    auto d = std::make_shared<Data>();
    d->kind = DriverKind::iid_parametric;
    d->sampler = std::move(sampler);
    d->bounded = bounded;
    return ErgodicDriver(std::move(d), order, master_seed);
  }

  // The circle [0, 1) is cut at the sorted points `cuts`; interval i carries
  // maps[i]. The base point moves by w -> w + alpha mod 1 and starts at a
  // seeded uniform position.
  static ErgodicDriver rotation(std::vector<double> cuts, std::vector<M> maps, Order order, std::uint64_t master_seed,
                                double alpha = kGoldenRotation) {
    if (maps.size() != cuts.size() + 1) throw InputError("rotation driver: need cuts.size() + 1 maps");
    for (std::size_t i = 0; i < cuts.size(); ++i) {
      if (!(cuts[i] > 0.0 && cuts[i] < 1.0) || (i > 0 && !(cuts[i] > cuts[i - 1])))
        throw InputError("rotation driver: cuts must be strictly increasing inside (0, 1)");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("rotation driver: alpha must lie in (0, 1)");
    auto d = std::make_shared<Data>();
    d->kind = DriverKind::rotation;
    d->maps = std::move(maps);
    d->cuts = std::move(cuts);
    d->alpha = alpha;
    double prev = 0.0;
    for (double c : d->cuts) {
      d->weights.push_back(c - prev);
      prev = c;
    }
    d->weights.push_back(1.0 - prev);
    return ErgodicDriver(std::move(d), order, master_seed);
  }

  class Stream {
   public:
    M next() {
      const Data& d = *data_;
      switch (d.kind) {
        case DriverKind::iid_finite:
          return d.maps.size() == 1 ? d.maps.front() : d.maps[rng_.categorical(d.weights)];
        case DriverKind::iid_parametric:
          return d.sampler(rng_);
        case DriverKind::rotation: {
          const auto idx = static_cast<std::size_t>(std::upper_bound(d.cuts.begin(), d.cuts.end(), omega_) - d.cuts.begin());
          omega_ += d.alpha;
          if (omega_ >= 1.0) omega_ -= 1.0;
          return d.maps[idx];
        }
      }
      throw ConsistencyError("ErgodicDriver: unknown kind");
    }

   private:
    friend class ErgodicDriver;
    Stream(std::shared_ptr<const Data> data, std::uint64_t seed) : data_(std::move(data)), rng_(seed) {
      if (data_->kind == DriverKind::rotation) omega_ = rng_.uniform();
    }
    std::shared_ptr<const Data> data_;
    Rng rng_;
    double omega_ = 0.0;
  };

  Stream stream(std::size_t trial) const { return Stream(data_, trial_seed(master_seed_, trial)); }

  // g(w), g(Tw), ..., g(T^{n-1} w) for the given trial.
  std::vector<M> maps_for(std::size_t trial, std::size_t n) const {
    auto s = stream(trial);
    std::vector<M> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(s.next());
    return out;
  }

  DriverKind kind() const { return data_->kind; }
  Order order() const { return order_; }
  std::uint64_t master_seed() const { return master_seed_; }
  // Finite support (iid_finite and rotation); empty for parametric drivers.
  const std::vector<M>& support() const { return data_->maps; }
  // Probability of each support map (interval lengths for rotations).
  const std::vector<double>& weights() const { return data_->weights; }
  bool bounded() const { return data_->kind != DriverKind::iid_parametric || data_->bounded; }

  ErgodicDriver with_order(Order order) const { return ErgodicDriver(data_, order, master_seed_); }
  ErgodicDriver with_seed(std::uint64_t seed) const { return ErgodicDriver(data_, order_, seed); }

 private:

  ErgodicDriver(std::shared_ptr<const Data> data, Order order, std::uint64_t seed)
      : data_(std::move(data)), order_(order), master_seed_(seed) {}

  std::shared_ptr<const Data> data_;
  Order order_ = Order::right_increment;
  std::uint64_t master_seed_ = 0;
};

// compose(a, b) is the map x -> a(b(x)); found by argument-dependent lookup.
template <class M>
concept Composable = requires(const M& a, const M& b) {
  { compose(a, b) } -> std::convertible_to<M>;
};

template <class P>
struct Orbit {
  std::vector<P> points;  // u(1) x0, ..., u(k) x0
  bool truncated = false;
  std::size_t truncated_at = 0;  // first step whose image left the domain
};

// Orbit of x0 under the products of `maps` in the given order. Right
// increments need the whole product u(k) at each step: maps with a
// `compose` accumulate it in O(n); others are re-applied in O(n^2).
template <class P, class M>
Orbit<P> orbit_from_maps(std::span<const M> maps, Order order, const WeakMetricSpace<P>& space, const P& x0) {
  Orbit<P> orbit;
  orbit.points.reserve(maps.size());
  auto fail = [&](std::size_t k) {
    orbit.truncated = true;
    orbit.truncated_at = k;
  };
  try {
    if (order == Order::left_increment) {
      P x = x0;
      for (std::size_t k = 0; k < maps.size(); ++k) {
        x = maps[k](x);
        if (!space.in_domain(x)) {
          fail(k + 1);
          return orbit;
        }
        orbit.points.push_back(x);
      }
    } else if constexpr (Composable<M>) {
      std::optional<M> u;
      for (std::size_t k = 0; k < maps.size(); ++k) {
        u = u ? M(compose(*u, maps[k])) : maps[k];
        P x = (*u)(x0);
        if (!space.in_domain(x)) {
          fail(k + 1);
          return orbit;
        }
        orbit.points.push_back(std::move(x));
      }
    } else {
      for (std::size_t k = 0; k < maps.size(); ++k) {
        P x = x0;
        for (std::size_t j = k + 1; j-- > 0;) x = maps[j](x);
        if (!space.in_domain(x)) {
          fail(k + 1);
          return orbit;
        }
        orbit.points.push_back(std::move(x));
      }
    }
  } catch (const DomainError&) {
    fail(orbit.points.size() + 1);
  }
  return orbit;
}

template <class P, class M>
Orbit<P> generate_orbit(const ErgodicDriver<M>& driver, const WeakMetricSpace<P>& space, const P& x0, std::size_t n,
                        std::size_t trial) {
  if (n == 0) throw InputError("generate_orbit: n must be at least 1");
  const auto maps = driver.maps_for(trial, n);
  return orbit_from_maps<P, M>(std::span<const M>(maps), driver.order(), space, x0);
}

template <class P>
struct SubadditiveTrace {
  std::vector<double> a;  // a[0] = 0, a[k] = d(x0, u(k) x0)
  P basepoint;
  bool truncated = false;
  std::size_t truncated_at = 0;
};

template <class P>
SubadditiveTrace<P> trace_from_orbit(const Orbit<P>& orbit, const WeakMetricSpace<P>& space, const P& x0) {
  SubadditiveTrace<P> t{{0.0}, x0, orbit.truncated, orbit.truncated_at};
  t.a.reserve(orbit.points.size() + 1);
  for (std::size_t k = 0; k < orbit.points.size(); ++k) {
    const double d = space.dist(x0, orbit.points[k]);
    if (!std::isfinite(d)) {
      t.truncated = true;
      t.truncated_at = k + 1;
      break;
    }
    t.a.push_back(d);
  }
  return t;
}

template <class P, class M>
SubadditiveTrace<P> subadditive_trace(const ErgodicDriver<M>& driver, const WeakMetricSpace<P>& space, const P& x0,
                                      std::size_t n, std::size_t trial) {
  return trace_from_orbit(generate_orbit(driver, space, x0, n, trial), space, x0);
}

struct LyapunovEstimate {
  double lambda_hat = 0.0;
  std::size_t n = 0;
  std::size_t trials = 0;  // trials that contributed
  std::vector<double> per_trial;
  std::vector<std::size_t> trial_ids;  // index of the trial behind each per_trial entry
  double std_error = 0.0;
  double tail_slope = 0.0;  // mean slope of a(k)/k against log10 k over k in [n/10, n]
  std::size_t truncated = 0;
};

// Least-squares slope of a[k]/k against log10 k over k in [max(1, n/10), n].
inline double tail_slope(std::span<const double> a) {
  const std::size_t n = a.size() - 1;
  const std::size_t lo = std::max<std::size_t>(1, n / 10);
  if (n < 2 || lo >= n) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double m = 0;
  for (std::size_t k = lo; k <= n; ++k) {
    const double x = std::log10(static_cast<double>(k));
    const double y = a[k] / static_cast<double>(k);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    m += 1;
  }
  const double den = m * sxx - sx * sx;
  return den > 0.0 ? (m * sxy - sx * sy) / den : 0.0;
}

// Aggregates per-trial results in trial order. Entries without a value are
// truncated trials; more than 10% of them is an EstimationError.
inline LyapunovEstimate summarize_trials(std::size_t n, const std::vector<std::optional<double>>& values,
                                         const std::vector<double>& slopes) {
  LyapunovEstimate e;
  e.n = n;
  double slope_sum = 0.0;
  for (std::size_t t = 0; t < values.size(); ++t) {
    if (!values[t]) {
      ++e.truncated;
      continue;
    }
    e.per_trial.push_back(*values[t]);
    e.trial_ids.push_back(t);
    slope_sum += slopes[t];
  }
  if (static_cast<double>(e.truncated) > 0.1 * static_cast<double>(values.size()) || e.per_trial.empty()) {
    throw EstimationError("estimate: " + std::to_string(e.truncated) + " of " + std::to_string(values.size()) +
                          " trials truncated");
  }
  e.trials = e.per_trial.size();
  const double m = static_cast<double>(e.trials);
  e.lambda_hat = std::accumulate(e.per_trial.begin(), e.per_trial.end(), 0.0) / m;
  if (e.trials > 1) {
    double ss = 0.0;
    for (double v : e.per_trial) ss += (v - e.lambda_hat) * (v - e.lambda_hat);
    e.std_error = std::sqrt(ss / (m - 1.0)) / std::sqrt(m);
  }
  e.tail_slope = slope_sum / m;
  return e;
}

template <class P, class M>
LyapunovEstimate estimate_top_exponent(const ErgodicDriver<M>& driver, const WeakMetricSpace<P>& space, const P& x0,
                                       std::size_t n, std::size_t trials, std::size_t threads = thread_budget()) {
  if (trials < 1) throw InputError("estimate_top_exponent: trials must be at least 1");
  if (n < 10) throw InputError("estimate_top_exponent: n must be at least 10");
  std::vector<std::optional<double>> values(trials);
  std::vector<double> slopes(trials, 0.0);
  parallel_for(trials, threads, [&](std::size_t t) {
    const auto tr = subadditive_trace(driver, space, x0, n, t);
    if (tr.truncated) return;
    values[t] = tr.a[n] / static_cast<double>(n);
    slopes[t] = tail_slope(tr.a);
  });
  return summarize_trials(n, values, slopes);
}

struct IntegrabilityReport {
  double mean_step = 0.0;  // E |d(x0, g x0)|
  bool exact = false;      // computed from the finite support, not sampled
  bool heavy = false;      // running means did not settle (warning only)
  double running_mean_spread = 0.0;
  double max_sample_share = 0.0;
  std::vector<double> running_means;  // at windows 100 * 2^j and at `samples`
};

// Heaviness flag from running means of nonnegative samples over doubling
// windows: raised when the later half of the window means spreads by more
// than 10% of the final mean, or one sample carries over 1% of the total.
inline IntegrabilityReport running_mean_diagnostic(std::span<const double> values) {
  IntegrabilityReport r;
  double sum = 0.0;
  double largest = 0.0;
  std::size_t window = 100;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += values[i];
    largest = std::max(largest, values[i]);
    if (i + 1 == window || i + 1 == values.size()) {
      r.running_means.push_back(sum / static_cast<double>(i + 1));
      if (i + 1 == window) window *= 2;
    }
  }
  r.mean_step = sum / static_cast<double>(values.size());
  const std::size_t w = r.running_means.size();
  const auto later = std::span<const double>(r.running_means).subspan(w / 2);
  const auto [lo, hi] = std::minmax_element(later.begin(), later.end());
  const double last = r.running_means.back();
  r.running_mean_spread = last != 0.0 ? (*hi - *lo) / std::abs(last) : (*hi - *lo == 0.0 ? 0.0 : INFINITY);
  r.max_sample_share = sum > 0.0 ? largest / sum : 0.0;
  r.heavy = r.running_mean_spread > 0.1 || r.max_sample_share > 0.01;
  return r;
}

template <class P, class M>
IntegrabilityReport check_integrability(const ErgodicDriver<M>& driver, const WeakMetricSpace<P>& space, const P& x0,
                                        std::size_t samples) {
  if (samples < 100) throw InputError("check_integrability: need at least 100 samples");
  auto step = [&](const M& g) {
    const double d = std::abs(space.dist(x0, g(x0)));
    if (!std::isfinite(d)) throw IntegrabilityError("check_integrability: non-finite step size d(x0, g x0)");
    return d;
  };
  if (driver.kind() != DriverKind::iid_parametric) {
    IntegrabilityReport r;
    r.exact = true;
    for (std::size_t i = 0; i < driver.support().size(); ++i) r.mean_step += driver.weights()[i] * step(driver.support()[i]);
    return r;
  }
  auto stream = driver.stream(0);
  std::vector<double> values(samples);
  for (auto& v : values) v = step(stream.next());
  return running_mean_diagnostic(values);
}

// Geometric subsequence of at most `count` steps in [1, n], always ending at n.
inline std::vector<std::size_t> geometric_checkpoints(std::size_t n, std::size_t count) {
  std::vector<std::size_t> ks;
  if (n == 0) return ks;
  if (count <= 1) return {n};
  for (std::size_t j = 0; j < count; ++j) {
    const double e = std::log(static_cast<double>(n)) * static_cast<double>(j) / static_cast<double>(count - 1);
    const auto k = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(std::exp(e))), 1, n);
    if (ks.empty() || k > ks.back()) ks.push_back(k);
  }
  if (ks.back() != n) ks.push_back(n);
  return ks;
}

template <class P>
struct GapOptions {
  // Orbit step whose point anchors h; 0 means the horizon n itself.
  std::size_t anchor_horizon = 0;
  // Builds h from the anchor point; empty means the anchor-backed functional
  // h(y) = d(y, anchor) - d(x0, anchor).
  std::function<std::function<double(const P&)>(const P& anchor)> functional;
  // For isometric maps under right increments, evaluates d(u(k) x0, anchor)
  // as d(x0, g(T^k w) ... g(T^{N-1} w) x0). Far-out points that share a long
  // common prefix are then never compared against each other directly.
  bool isometric_tail = false;
};

struct GapReport {
  std::vector<std::size_t> k;
  std::vector<double> gap;      // |-(1/k) h(u(k) x0) - (1/k) d(x0, u(k) x0)|
  std::vector<double> kingman;  // a(k) / k
  bool truncated = false;
};

template <class P, class M>
GapReport horofunction_gap(const ErgodicDriver<M>& driver, const WeakMetricSpace<P>& space, const P& x0, std::size_t n,
                       std::size_t probe_budget, std::size_t trial, const GapOptions<P>& options = {}) {
  if (n < 100) throw InputError("gap diagnostic: n must be at least 100");
  const std::size_t horizon = std::max(n, options.anchor_horizon);
  if (options.isometric_tail && options.functional)
    throw InputError("gap diagnostic: isometric_tail needs the anchor-backed functional");
  if (options.isometric_tail && driver.order() != Order::right_increment)
    throw InputError("gap diagnostic: isometric_tail needs right increments");
  const auto maps = driver.maps_for(trial, horizon);
  const auto orbit = orbit_from_maps<P, M>(std::span<const M>(maps), driver.order(), space, x0);
  GapReport r;
  if (orbit.truncated) {
    r.truncated = true;
    return r;
  }
  const P& anchor = orbit.points[horizon - 1];
  const auto ks = geometric_checkpoints(n, std::max<std::size_t>(probe_budget, 1));
  std::vector<double> h_at(ks.size());  // h(u(k) x0)
  if (options.functional) {
    const auto h = options.functional(anchor);
    for (std::size_t i = 0; i < ks.size(); ++i) h_at[i] = h(orbit.points[ks[i] - 1]);
  } else if (options.isometric_tail) {
    const double offset = checked_dist(space, x0, anchor);
    P y = x0;  // g_{j+1} ... g_N x0 at the top of each step
    std::size_t next = ks.size();
    for (std::size_t j = horizon; j > 0 && next > 0; --j) {
      for (; next > 0 && ks[next - 1] == j; --next) h_at[next - 1] = checked_dist(space, x0, y) - offset;
      y = maps[j - 1](y);
      if (!space.in_domain(y)) {
        r.truncated = true;
        return r;
      }
    }
  } else {
    const double offset = checked_dist(space, x0, anchor);
    for (std::size_t i = 0; i < ks.size(); ++i) h_at[i] = checked_dist(space, orbit.points[ks[i] - 1], anchor) - offset;
  }
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const std::size_t k = ks[i];
    const double kk = static_cast<double>(k);
    const double a = checked_dist(space, x0, orbit.points[k - 1]);
    r.k.push_back(k);
    r.kingman.push_back(a / kk);
    r.gap.push_back(std::abs(-h_at[i] / kk - a / kk));
  }
  return r;
}

}  // namespace horoflow
