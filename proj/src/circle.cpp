#include "horoflow/circle.hpp"

#include <cmath>
#include <numbers>
#include <variant>

#include "horoflow/errors.hpp"

namespace horoflow {

namespace {

using Complex = std::complex<double>;

struct Identity {};
struct Rotation {
  double phi;
};
struct Mobius {
  Complex alpha;
  Complex beta;
  double det;  // |alpha|^2 - |beta|^2
};
struct Sine {
  double a;
  double phase;
};
struct Functions {
  CircleMap::RealFn lift;
  CircleMap::RealFn derivative;
};
struct Composite {
  std::vector<CircleMap> maps;
};

Complex unit(Complex z) { return z / std::abs(z); }

// e^{-i d} - 1 without cancellation
Complex expm1_neg_i(double d) {
  const double s = std::sin(0.5 * d);
  return {-2.0 * s * s, -std::sin(d)};
}

}  // namespace

struct CircleMap::Impl {
  std::variant<Identity, Rotation, Mobius, Sine, Functions, Composite> kind;
};

CircleMap::CircleMap() : CircleMap(std::make_shared<const Impl>(Impl{Identity{}})) {}
CircleMap::CircleMap(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

CircleMap CircleMap::identity() { return CircleMap(); }

CircleMap CircleMap::rotation(double phi) { return CircleMap(std::make_shared<const Impl>(Impl{Rotation{phi}})); }

CircleMap CircleMap::mobius(Complex alpha, Complex beta) {
  const double det = std::norm(alpha) - std::norm(beta);
  if (!(det > 0.0)) throw NotDiffeomorphismError("CircleMap::mobius: need |alpha| > |beta|");
  return CircleMap(std::make_shared<const Impl>(Impl{Mobius{alpha, beta, det}}));
}

CircleMap CircleMap::mobius_translation(double a, double psi) {
  if (!(std::abs(a) < 1.0)) throw NotDiffeomorphismError("CircleMap::mobius_translation: need |a| < 1");
  const double c = 1.0 / std::sqrt(1.0 - a * a);
  return mobius({c, 0.0}, std::polar(a * c, psi));
}

CircleMap CircleMap::sine_perturbation(double a, double phase) {
  if (!(std::abs(a) < 1.0)) throw NotDiffeomorphismError("CircleMap::sine_perturbation: need |a| < 1");
  return CircleMap(std::make_shared<const Impl>(Impl{Sine{a, phase}}));
}

CircleMap CircleMap::from_functions(RealFn lift, RealFn derivative) {
  if (!lift) throw InputError("CircleMap::from_functions: empty lift");
  if (!derivative) {
    derivative = [lift](double t) {
      constexpr double h = 1e-6;
      return (lift(t + h) - lift(t - h)) / (2.0 * h);
    };
  }
  return CircleMap(std::make_shared<const Impl>(Impl{Functions{std::move(lift), std::move(derivative)}}));
}

CircleMap CircleMap::composite(std::vector<CircleMap> maps) {
  if (maps.empty()) return identity();
  if (maps.size() == 1) return maps.front();
  return CircleMap(std::make_shared<const Impl>(Impl{Composite{std::move(maps)}}));
}

CircleMap compose(const CircleMap& f, const CircleMap& g) { return CircleMap::composite({g, f}); }

bool CircleMap::is_identity() const { return std::holds_alternative<Identity>(impl_->kind); }

double CircleMap::lift(double theta) const {
  return std::visit(
      [theta](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Identity>) {
          return theta;
        } else if constexpr (std::is_same_v<K, Rotation>) {
          return theta + k.phi;
        } else if constexpr (std::is_same_v<K, Mobius>) {
          // f(e^{it}) = e^{it} w / conj(w) with w = alpha + beta e^{-it};
          // w / alpha stays in the right half-plane, so the branch is continuous
          const Complex w = k.alpha + k.beta * std::polar(1.0, -theta);
          return theta + 2.0 * (std::arg(k.alpha) + std::arg(w / k.alpha));
        } else if constexpr (std::is_same_v<K, Sine>) {
          return theta + k.a * std::sin(theta - k.phase);
        } else if constexpr (std::is_same_v<K, Functions>) {
          return k.lift(theta);
        } else {
          double t = theta;
          for (const auto& m : k.maps) t = m.lift(t);
          return t;
        }
      },
      impl_->kind);
}

double CircleMap::derivative(double theta) const {
  return std::visit(
      [theta](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Identity> || std::is_same_v<K, Rotation>) {
          return 1.0;
        } else if constexpr (std::is_same_v<K, Mobius>) {
          return k.det / std::norm(k.alpha + k.beta * std::polar(1.0, -theta));
        } else if constexpr (std::is_same_v<K, Sine>) {
          return 1.0 + k.a * std::cos(theta - k.phase);
        } else if constexpr (std::is_same_v<K, Functions>) {
          return k.derivative(theta);
        } else {
          double t = theta;
          double d = 1.0;
          for (const auto& m : k.maps) {
            d *= m.derivative(t);
            t = m.lift(t);
          }
          return d;
        }
      },
      impl_->kind);
}

CircleMap::Complex CircleMap::apply(Complex z) const {
  return std::visit(
      [z](const auto& k) -> Complex {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Identity>) {
          return z;
        } else if constexpr (std::is_same_v<K, Rotation>) {
          return unit(z * std::polar(1.0, k.phi));
        } else if constexpr (std::is_same_v<K, Mobius>) {
          const Complex w = k.alpha + k.beta * std::conj(z);
          return unit(z * (w / std::conj(w)));
        } else if constexpr (std::is_same_v<K, Sine>) {
          const double t = std::arg(z);
          return std::polar(1.0, t + k.a * std::sin(t - k.phase));
        } else if constexpr (std::is_same_v<K, Functions>) {
          return std::polar(1.0, k.lift(std::arg(z)));
        } else {
          Complex x = z;
          for (const auto& m : k.maps) x = m.apply(x);
          return x;
        }
      },
      impl_->kind);
}

double CircleMap::derivative_at(Complex z) const {
  return std::visit(
      [z](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Identity> || std::is_same_v<K, Rotation>) {
          return 1.0;
        } else if constexpr (std::is_same_v<K, Mobius>) {
          return k.det / std::norm(k.alpha + k.beta * std::conj(z));
        } else if constexpr (std::is_same_v<K, Sine>) {
          return 1.0 + k.a * std::cos(std::arg(z) - k.phase);
        } else if constexpr (std::is_same_v<K, Functions>) {
          return k.derivative(std::arg(z));
        } else {
          Complex x = z;
          double d = 1.0;
          for (const auto& m : k.maps) {
            d *= m.derivative_at(x);
            x = m.apply(x);
          }
          return d;
        }
      },
      impl_->kind);
}

double CircleMap::difference(Complex z, double delta) const {
  return std::visit(
      [z, delta](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Identity> || std::is_same_v<K, Rotation>) {
          return delta;
        } else if constexpr (std::is_same_v<K, Mobius>) {
          // arg of w(theta + delta) / w(theta) = 1 + beta conj(z) (e^{-i delta} - 1) / w
          const Complex w = k.alpha + k.beta * std::conj(z);
          const Complex eps = k.beta * std::conj(z) * expm1_neg_i(delta) / w;
          return delta + 2.0 * std::atan2(eps.imag(), 1.0 + eps.real());
        } else if constexpr (std::is_same_v<K, Sine>) {
          const double t = std::arg(z);
          return delta + 2.0 * k.a * std::cos(t - k.phase + 0.5 * delta) * std::sin(0.5 * delta);
        } else if constexpr (std::is_same_v<K, Functions>) {
          const double t = std::arg(z);
          if (std::abs(delta) < 1e-6) return k.derivative(t) * delta;
          return k.lift(t + delta) - k.lift(t);
        } else {
          Complex x = z;
          double d = delta;
          for (const auto& m : k.maps) {
            d = m.difference(x, d);
            x = m.apply(x);
          }
          return d;
        }
      },
      impl_->kind);
}

std::complex<double> circle_point(std::size_t k, std::size_t count) {
  if (count == 0) throw InputError("circle_point: count must be positive");
  k %= count;
  if ((4 * k) % count == 0) {
    switch ((4 * k) / count) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count));
}

double jacobian_dist(const CircleMap& f, const CircleMap& g, std::size_t grid) {
  if (grid < 16) throw InputError("jacobian_dist: grid must have at least 16 points");
  double best = 0.0;
  for (std::size_t j = 0; j < grid; ++j) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(grid);
    const double df = f.derivative(theta);
    const double dg = g.derivative(theta);
    if (!(df > 0.0) || !(dg > 0.0) || !std::isfinite(df) || !std::isfinite(dg))
      throw NotDiffeomorphismError("jacobian_dist: derivative not positive on the grid");
    best = std::max(best, std::abs(std::log(dg / df)));
  }
  return best;
}

WeakMetricSpace<CircleMap> jacobian_space(std::size_t grid) {
  if (grid < 16) throw InputError("jacobian_space: grid must have at least 16 points");
  WeakMetricSpace<CircleMap> s;
  s.name = "jacobian";
  s.dist = [grid](const CircleMap& f, const CircleMap& g) { return jacobian_dist(f, g, grid); };
  // every rotation is at distance 0 from the identity
  s.separates_points = false;
  return s;
}

}  // namespace horoflow
