#pragma once

// Poincare disk. Points far out toward the boundary cannot be told apart by
// |z| alone once 1 - |z|^2 drops below machine epsilon (hyperbolic radius
// around 37), so each point also carries log(1 - |z|^2), which Mobius maps
// update exactly through their derivative.

#include <complex>

#include "horoflow/metric_core.hpp"

namespace horoflow {

using Complex = std::complex<double>;

class DiskPoint {
 public:
  DiskPoint() = default;
  // Throws DomainError unless |z| < 1.
  explicit DiskPoint(Complex z);
  // Point at hyperbolic distance `radius` from 0 in direction `angle`.
  static DiskPoint from_polar(double radius, double angle);
  static DiskPoint from_parts(Complex z, double log_defect);

  Complex z() const { return z_; }
  // log(1 - |z|^2), always < 0 away from the origin.
  double log_defect() const { return log_defect_; }
  double modulus() const;
  // z / |z|, or 1 at the origin.
  Complex direction() const;
  bool valid() const;

 private:
  Complex z_{0.0, 0.0};
  double log_defect_ = 0.0;
};

double poincare_dist(const DiskPoint& z, const DiskPoint& w);

// log(|xi - z|^2 / (1 - |z|^2)) for a boundary point xi.
double busemann_disk(Complex xi, const DiskPoint& z);

WeakMetricSpace<DiskPoint> poincare_space();

// Orientation-preserving disk automorphism z -> (a z + b) / (conj(b) z + conj(a)),
// stored with |a| = 1 and the half log-determinant of the unnormalized pair.
class MobiusMap {
 public:
  MobiusMap() = default;
  static MobiusMap identity();
  // Hyperbolic translation along the diameter at angle psi sending 0 to a e^{i psi}.
  static MobiusMap translation(double a, double psi = 0.0);
  static MobiusMap rotation(double phi);

  DiskPoint operator()(const DiskPoint& p) const;
  // Translation length: inf over the disk of d(z, f z).
  double translation_length() const;

  Complex alpha() const { return alpha_; }
  Complex beta() const { return beta_; }
  double log_det_half() const { return log_det_half_; }

  friend MobiusMap compose(const MobiusMap& f, const MobiusMap& g);

 private:
  MobiusMap(Complex alpha, Complex beta, double log_det_half);
  Complex alpha_{1.0, 0.0};
  Complex beta_{0.0, 0.0};
  double log_det_half_ = 0.0;
};

// f after g
MobiusMap compose(const MobiusMap& f, const MobiusMap& g);

}  // namespace horoflow
