#include "horoflow/deepnet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "horoflow/errors.hpp"

namespace horoflow {

double activate(Activation a, double t) {
  switch (a) {
    case Activation::relu: return t > 0.0 ? t : 0.0;
    case Activation::tanh: return std::tanh(t);
    case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-t));
  }
  return t;
}

const char* to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::sigmoid: return "sigmoid";
  }
  return "?";
}

Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::relu;
  if (name == "tanh") return Activation::tanh;
  if (name == "sigmoid") return Activation::sigmoid;
  throw InputError("unknown activation '" + name + "' (expected relu, tanh or sigmoid)");
}

double power_iteration_norm(const Matrix& w, int* iterations) {
  if (!all_finite(w)) throw DomainError("power_iteration_norm: non-finite entries");
  Rng rng(splitmix64(0x9E3779B97F4A7C15ULL ^ w.cols()));
  Vector x = rng.normal_vector(w.cols());
  double len = norm2(x);
  for (auto& v : x) v /= len;
  const Matrix wt = w.transposed();
  double lambda = 0.0;
  int it = 0;
  for (; it < 1000; ++it) {
    const Vector y = wt * (w * x);
    const double next = dot(x, y);
    len = norm2(y);
    if (len == 0.0) {
      lambda = 0.0;
      break;
    }
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = y[i] / len;
    const bool done = it > 0 && std::abs(next - lambda) <= 1e-12 * next;
    lambda = next;
    if (done) break;
  }
  if (iterations) *iterations = it + 1;
  return std::sqrt(std::max(lambda, 0.0));
}

NormalizedWeight spectral_normalize(const Matrix& w) {
  NormalizedWeight out;
  const double est = power_iteration_norm(w, &out.iterations);
  out.w = w;
  if (est > 1.0) out.w /= est;
  out.certified_norm = spectral_norm(out.w);
  // Power iteration approaches the top singular value from below; a
  // residual excess is removed against the direct value.
  if (est > 1.0 && out.certified_norm > 1.0) {
    out.w /= out.certified_norm;
    out.certified_norm = spectral_norm(out.w);
  }
  return out;
}

LayerMap::LayerMap(Matrix w, Vector b, Activation act, LayerForm form, double norm)
    : w_(std::move(w)), b_(std::move(b)), act_(act), form_(form), norm_(norm) {
  if (w_.empty() || b_.size() != w_.rows()) throw InputError("LayerMap: bias length must equal the number of rows of W");
  if (form_ == LayerForm::plain && !w_.square()) throw InputError("LayerMap: plain layers need a square W");
  if (!all_finite(w_) || !all_finite(b_)) throw DomainError("LayerMap: non-finite parameters");
}

LayerMap LayerMap::certified(Matrix w, Vector b, Activation act, LayerForm form) {
  auto nw = spectral_normalize(w);
  return LayerMap(std::move(nw.w), std::move(b), act, form, nw.certified_norm);
}

LayerMap LayerMap::audited(Matrix w, Vector b, Activation act, LayerForm form) {
  const double norm = spectral_norm(w);
  if (norm > 1.0 + 1e-9)
    throw NormConstraintError("LayerMap::audited: operator norm " + std::to_string(norm) + " exceeds 1");
  return LayerMap(std::move(w), std::move(b), act, form, norm);
}

LayerMap LayerMap::unconstrained(Matrix w, Vector b, Activation act, LayerForm form) {
  const double norm = spectral_norm(w);
  return LayerMap(std::move(w), std::move(b), act, form, norm);
}

Vector LayerMap::operator()(const Vector& x) const {
  if (x.size() != w_.cols()) throw InputError("LayerMap: input dimension mismatch");
  Vector h = w_ * x;
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = activate(act_, h[i] + b_[i]);
  if (form_ == LayerForm::plain) return h;
  Vector out(w_.cols(), 0.0);
  for (std::size_t i = 0; i < w_.rows(); ++i)
    for (std::size_t j = 0; j < w_.cols(); ++j) out[j] += w_(i, j) * h[i];
  return out;
}

Vector apply_chain(std::span<const LayerMap> layers, const Vector& x0) {
  Vector x = x0;
  for (const auto& layer : layers) x = layer(x);
  return x;
}

DriftReport resnet_drift(const ErgodicDriver<LayerMap>& driver, const Vector& x0, std::size_t n, std::size_t trials,
                         std::size_t threads) {
  if (n < 1 || trials < 1) throw InputError("resnet_drift: n and trials must be at least 1");
  if (x0.empty()) throw InputError("resnet_drift: empty input");
  const double nn = static_cast<double>(n);
  Vector x1 = x0;
  x1[0] += 1.0;

  DriftReport r;
  r.n = n;
  r.v_hat.assign(trials, Vector(x0.size(), 0.0));
  std::vector<double> gaps(trials, 0.0);
  parallel_for(trials, threads, [&](std::size_t t) {
    const auto layers = driver.maps_for(t, n);
    for (std::size_t k = 0; k < n; ++k) {
      if (layers[k].certified_norm() > 1.0 + 1e-9)
        throw NormConstraintError("resnet_drift: layer " + std::to_string(k + 1) + " of trial " + std::to_string(t) +
                                  " has operator norm " + std::to_string(layers[k].certified_norm()) + " > 1");
    }
    Vector u = x0;
    Vector w = x1;
    for (std::size_t k = n; k-- > 0;) {
      u = layers[k](u);
      w = layers[k](w);
    }
    gaps[t] = norm2(u - w) / nn;
    for (auto& v : u) v /= nn;
    r.v_hat[t] = std::move(u);
  });

  const std::size_t d = x0.size();
  const double m = static_cast<double>(trials);
  r.mean.assign(d, 0.0);
  r.per_coordinate_se.assign(d, 0.0);
  for (const auto& v : r.v_hat)
    for (std::size_t i = 0; i < d; ++i) r.mean[i] += v[i] / m;
  if (trials > 1) {
    for (std::size_t i = 0; i < d; ++i) {
      double ss = 0.0;
      for (const auto& v : r.v_hat) ss += (v[i] - r.mean[i]) * (v[i] - r.mean[i]);
      r.per_coordinate_se[i] = std::sqrt(ss / (m - 1.0)) / std::sqrt(m);
    }
  }
  r.cross_input_gap = *std::max_element(gaps.begin(), gaps.end());
  return r;
}

double lipschitz_profile(std::span<const LayerMap> layers, const PairSampler<Vector>& sampler, std::size_t n_pairs,
                         std::uint64_t seed) {
  if (layers.empty()) throw InputError("lipschitz_profile: empty chain");
  if (n_pairs < 1) throw InputError("lipschitz_profile: n_pairs must be at least 1");
  Rng rng(seed);
  const double depth = static_cast<double>(layers.size());
  double best = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < n_pairs; ++i) {
    const auto [x, y] = sampler(rng);
    const double before = norm2(x - y);
    if (before == 0.0) continue;
    const double after = norm2(apply_chain(layers, x) - apply_chain(layers, y));
    best = std::max(best, after / (depth * before));
    ++used;
  }
  if (used == 0) throw InputError("lipschitz_profile: every sampled pair was coincident");
  return best;
}

namespace {

struct TrackedPair {
  std::complex<double> base;
  double gap;  // angular offset of the second point
};

// Chord ratio |f(x) - f(y)| / |x - y| on the unit circle.
double chord_ratio(double gap, double gap0) { return std::abs(std::sin(0.5 * gap)) / std::abs(std::sin(0.5 * gap0)); }

}  // namespace

StretchReport max_stretch(const ErgodicDriver<CircleMap>& driver, std::size_t n, std::size_t grid, std::size_t trial,
                          const StretchOptions& options) {
  if (n < 1) throw InputError("max_stretch: n must be at least 1");
  std::vector<TrackedPair> initial;
  for (std::size_t j = 0; j < grid; ++j) {
    const auto z = circle_point(j, grid);
    for (double s : options.scales) {
      initial.push_back({z, s});
      initial.push_back({z, -s});
    }
  }
  Rng rng(splitmix64(trial_seed(driver.master_seed(), trial)));
  for (std::size_t i = 0; i < options.global_pairs; ++i) {
    const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
    double gap = 0.0;
    while (gap == 0.0) gap = rng.uniform(-std::numbers::pi, std::numbers::pi);
    initial.push_back({std::polar(1.0, theta), gap});
  }
  if (initial.size() < 1000) throw InputError("max_stretch: fewer than 1000 sampled pairs");

  StretchReport r;
  r.pairs = initial.size();
  const auto maps = driver.maps_for(trial, n);

  auto record = [&](std::size_t depth, const std::vector<TrackedPair>& state) {
    double best = -1.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < state.size(); ++i) {
      const double ratio = chord_ratio(state[i].gap, initial[i].gap);
      if (!std::isfinite(ratio) || !std::isfinite(state[i].base.real())) return false;
      if (ratio > best) {
        best = ratio;
        arg = i;
      }
    }
    const auto& p = initial[arg];
    r.depths.push_back(depth);
    r.log_stretch.push_back(std::log(best));
    r.argmax_trace.push_back({p.base, p.base * std::polar(1.0, p.gap)});
    r.z_hat = p.base * std::polar(1.0, 0.5 * p.gap);
    return true;
  };
  auto step = [](const CircleMap& m, std::vector<TrackedPair>& state) {
    for (auto& p : state) {
      p.gap = m.difference(p.base, p.gap);
      p.base = m.apply(p.base);
    }
  };

  if (driver.order() == Order::left_increment) {
    auto state = initial;
    for (std::size_t k = 1; k <= n; ++k) {
      step(maps[k - 1], state);
      if (!record(k, state)) {
        r.truncated = true;
        break;
      }
    }
  } else {
    for (std::size_t k = 1; k <= n; ++k) {
      auto state = initial;
      for (std::size_t j = k; j-- > 0;) step(maps[j], state);
      if (!record(k, state)) {
        r.truncated = true;
        break;
      }
    }
  }
  if (!r.log_stretch.empty()) r.lambda_hat = r.log_stretch.back() / static_cast<double>(r.depths.back());
  return r;
}

JacobianTrace jacobian_cocycle_dist(const ErgodicDriver<CircleMap>& driver, std::size_t n, std::size_t grid,
                                    std::size_t trial) {
  if (grid < 16) throw InputError("jacobian_cocycle_dist: grid must have at least 16 points");
  if (n < 1) throw InputError("jacobian_cocycle_dist: n must be at least 1");
  const auto maps = driver.maps_for(trial, n);
  auto log_derivative = [](const CircleMap& m, std::complex<double> z) {
    const double d = m.derivative_at(z);
    if (!(d > 0.0) || !std::isfinite(d))
      throw NotDiffeomorphismError("jacobian_cocycle_dist: composed derivative not positive on the grid");
    return std::log(d);
  };

  JacobianTrace tr;
  std::vector<std::complex<double>> points(grid);
  for (std::size_t j = 0; j < grid; ++j) points[j] = circle_point(j, grid);
  auto push = [&](std::size_t k, double a) {
    tr.a.push_back(a);
    tr.ratio.push_back(a / static_cast<double>(k));
  };

  if (driver.order() == Order::left_increment) {
    std::vector<double> logd(grid, 0.0);
    for (std::size_t k = 1; k <= n; ++k) {
      double a = 0.0;
      for (std::size_t j = 0; j < grid; ++j) {
        logd[j] += log_derivative(maps[k - 1], points[j]);
        points[j] = maps[k - 1].apply(points[j]);
        a = std::max(a, std::abs(logd[j]));
      }
      push(k, a);
    }
  } else {
    for (std::size_t k = 1; k <= n; ++k) {
      double a = 0.0;
      for (std::size_t j = 0; j < grid; ++j) {
        auto z = points[j];
        double l = 0.0;
        for (std::size_t i = k; i-- > 0;) {
          l += log_derivative(maps[i], z);
          z = maps[i].apply(z);
        }
        a = std::max(a, std::abs(l));
      }
      push(k, a);
    }
  }
  return tr;
}

}  // namespace horoflow
