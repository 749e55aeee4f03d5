#include "horoflow/disk.hpp"

#include <cmath>
#include <numbers>
#include <tuple>

namespace horoflow {

namespace {

// log(0.75): below this defect |z| < 0.5 and z itself is the accurate record.
const double kInnerDefect = std::log(0.75);

double log_add_exp(double a, double b) {
  if (a == -INFINITY) return b;
  if (b == -INFINITY) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

}  // namespace

DiskPoint::DiskPoint(Complex z) : z_(z) {
  const double r2 = std::norm(z);
  if (!std::isfinite(r2) || r2 >= 1.0) throw DomainError("DiskPoint: |z| must be < 1");
  log_defect_ = std::log1p(-r2);
}

DiskPoint DiskPoint::from_polar(double radius, double angle) {
  if (!(radius >= 0.0) || !std::isfinite(radius)) throw DomainError("DiskPoint::from_polar: radius must be finite and >= 0");
  const double half = 0.5 * radius;
  // -2 log cosh(r/2), stable for large r
  const double ld = -2.0 * (half + std::log1p(std::exp(-2.0 * half)) - std::numbers::ln2);
  return from_parts(std::polar(std::tanh(half), angle), radius == 0.0 ? 0.0 : ld);
}

DiskPoint DiskPoint::from_parts(Complex z, double log_defect) {
  DiskPoint p;
  p.z_ = z;
  p.log_defect_ = log_defect;
  return p;
}

double DiskPoint::modulus() const {
  if (log_defect_ > kInnerDefect) return std::abs(z_);
  return std::sqrt(-std::expm1(log_defect_));
}

Complex DiskPoint::direction() const {
  const double r = std::abs(z_);
  return r > 0.0 ? z_ / r : Complex(1.0, 0.0);
}

bool DiskPoint::valid() const {
  if (!std::isfinite(z_.real()) || !std::isfinite(z_.imag()) || !std::isfinite(log_defect_)) return false;
  if (log_defect_ > 0.0) return false;
  return log_defect_ < 0.0 || z_ == Complex(0.0, 0.0);
}

double poincare_dist(const DiskPoint& z_in, const DiskPoint& w_in) {
  if (!z_in.valid() || !w_in.valid()) throw DomainError("poincare_dist: point outside the open disk");
  // fixed argument order makes the result bitwise symmetric
  auto key = [](const DiskPoint& p) { return std::tuple(p.log_defect(), p.z().real(), p.z().imag()); };
  const bool swap = key(w_in) < key(z_in);
  const DiskPoint& z = swap ? w_in : z_in;
  const DiskPoint& w = swap ? z_in : w_in;
  const double rz = z.modulus();
  const double rw = w.modulus();
  // log |z - w|^2 from its radial and angular parts, kept in logs so points
  // whose defects underflow still have a finite distance
  double log_radial2 = -INFINITY;
  if (z.log_defect() <= kInnerDefect && w.log_defect() <= kInnerDefect) {
    // |z| - |w| = ((1-|w|^2) - (1-|z|^2)) / (|z| + |w|) without cancellation
    const double delta = w.log_defect() - z.log_defect();
    if (delta > 0.0) {
      const double log_expm1 = delta > 40.0 ? delta + std::log1p(-std::exp(-delta)) : std::log(std::expm1(delta));
      log_radial2 = 2.0 * (z.log_defect() + log_expm1 - std::log(rz + rw));
    }
  } else if (rz != rw) {
    log_radial2 = 2.0 * std::log(std::abs(rz - rw));
  }
  const double angular = std::norm(z.direction() - w.direction());
  const double log_angular =
      (angular > 0.0 && rz > 0.0 && rw > 0.0) ? std::log(rz) + std::log(rw) + std::log(angular) : -INFINITY;
  const double log_chord2 = log_add_exp(log_radial2, log_angular);
  if (log_chord2 == -INFINITY) return 0.0;
  // sinh^2(d/2) = |z-w|^2 / ((1-|z|^2)(1-|w|^2))
  const double log_s = log_chord2 - z.log_defect() - w.log_defect();
  if (log_s > 600.0) return 2.0 * std::numbers::ln2 + log_s;
  return 2.0 * std::asinh(std::exp(0.5 * log_s));
}

double busemann_disk(Complex xi, const DiskPoint& z) {
  const double m = std::abs(xi);
  if (!(std::abs(m - 1.0) <= 1e-12)) throw InputError("busemann_disk: xi must lie on the unit circle");
  if (!z.valid()) throw DomainError("busemann_disk: point outside the open disk");
  xi /= m;
  const double r = z.modulus();
  // |xi - z|^2 = (1 - |z|)^2 + |z| |xi - z/|z||^2, with log(1 - |z|) = ld - log(1 + |z|)
  const double radial = 2.0 * (z.log_defect() - std::log1p(r));
  const double gap = std::norm(xi - z.direction());
  const double angular = (r > 0.0 && gap > 0.0) ? std::log(r) + std::log(gap) : -INFINITY;
  return log_add_exp(radial, angular) - z.log_defect();
}

WeakMetricSpace<DiskPoint> poincare_space() {
  WeakMetricSpace<DiskPoint> s;
  s.name = "poincare";
  s.dist = poincare_dist;
  s.separates_points = true;
  s.contains = [](const DiskPoint& p) { return p.valid(); };
  s.ulp_budget = 4.0;
  return s;
}

MobiusMap::MobiusMap(Complex alpha, Complex beta, double log_det_half)
    : alpha_(alpha), beta_(beta), log_det_half_(log_det_half) {
  const double m = std::abs(alpha_);
  if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("MobiusMap: degenerate coefficients");
  alpha_ /= m;
  beta_ /= m;
  log_det_half_ -= std::log(m);
}

MobiusMap MobiusMap::identity() { return MobiusMap({1.0, 0.0}, {0.0, 0.0}, 0.0); }

MobiusMap MobiusMap::translation(double a, double psi) {
  if (!(std::abs(a) < 1.0)) throw DomainError("MobiusMap::translation: need |a| < 1");
  // (1, a e^{i psi}) has determinant 1 - a^2
  return MobiusMap({1.0, 0.0}, std::polar(a, psi), 0.5 * std::log1p(-a * a));
}

MobiusMap MobiusMap::rotation(double phi) { return MobiusMap(std::polar(1.0, 0.5 * phi), {0.0, 0.0}, 0.0); }

DiskPoint MobiusMap::operator()(const DiskPoint& p) const {
  const Complex z = p.z();
  const Complex w = std::conj(beta_) * z + std::conj(alpha_);
  const Complex image = (alpha_ * z + beta_) / w;
  // 1 - |f z|^2 = det (1 - |z|^2) / |w|^2
  double ld = p.log_defect() + 2.0 * log_det_half_ - 2.0 * std::log(std::abs(w));
  if (ld > kInnerDefect) ld = std::log1p(-std::norm(image));
  return DiskPoint::from_parts(image, ld);
}

double MobiusMap::translation_length() const {
  // trace of the determinant-one representative is 2 Re(alpha) / sqrt(det)
  const double half_trace = std::abs(alpha_.real()) * std::exp(-log_det_half_);
  return half_trace > 1.0 ? 2.0 * std::acosh(half_trace) : 0.0;
}

MobiusMap compose(const MobiusMap& f, const MobiusMap& g) {
  const Complex alpha = f.alpha_ * g.alpha_ + f.beta_ * std::conj(g.beta_);
  const Complex beta = f.alpha_ * g.beta_ + f.beta_ * std::conj(g.alpha_);
  return MobiusMap(alpha, beta, f.log_det_half_ + g.log_det_half_);
}

}  // namespace horoflow
