#pragma once

// Orientation-preserving circle diffeomorphisms, given as lifts theta -> f(theta)
// with explicit derivatives, and the Jacobian weak metric
// sup_theta |log g'(theta) / f'(theta)|.

#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include "horoflow/metric_core.hpp"

namespace horoflow {

class CircleMap {
 public:
  using Complex = std::complex<double>;
  using RealFn = std::function<double(double)>;

  CircleMap();  // identity
  static CircleMap identity();
  static CircleMap rotation(double phi);
  // Boundary action of the disk map with |alpha|^2 > |beta|^2.
  static CircleMap mobius(Complex alpha, Complex beta);
  // Boundary action of the hyperbolic translation sending 0 to a e^{i psi};
  // its repelling fixed point -e^{i psi} has derivative (1 + a) / (1 - a).
  static CircleMap mobius_translation(double a, double psi = 0.0);
  // theta -> theta + a sin(theta - phase), |a| < 1
  static CircleMap sine_perturbation(double a, double phase = 0.0);
  // Lift with an optional derivative; without one a central difference with
  // step 1e-6 is used.
  static CircleMap from_functions(RealFn lift, RealFn derivative = {});
  // maps.front() applied first.
  static CircleMap composite(std::vector<CircleMap> maps);

  double lift(double theta) const;
  double derivative(double theta) const;

  // Same map acting on unit complex numbers. Mobius and rotation maps keep
  // exactly representable fixed points such as -1 fixed in floating point.
  Complex apply(Complex z) const;
  double derivative_at(Complex z) const;
  // f(theta + delta) - f(theta) for theta = arg z, accurate for tiny delta.
  double difference(Complex z, double delta) const;

  bool is_identity() const;

 private:
  struct Impl;
  explicit CircleMap(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

// f after g
CircleMap compose(const CircleMap& f, const CircleMap& g);

// e^{2 pi i k / count}, exact at quarter turns.
std::complex<double> circle_point(std::size_t k, std::size_t count);

// max over theta_j = 2 pi j / grid of |log(g'(theta_j) / f'(theta_j))|, grid >= 16.
double jacobian_dist(const CircleMap& f, const CircleMap& g, std::size_t grid);

WeakMetricSpace<CircleMap> jacobian_space(std::size_t grid);

}  // namespace horoflow
